"""Figure rendering for the CLI report paths (matplotlib, file output only)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = [
    "plot_trajectory",
    "plot_section_scatter",
    "plot_trap_overlay",
    "plot_gah_demo",
    "plot_model_clouds",
]

_DPI = 150


def plot_trajectory(ys, path, rotated: bool) -> str:
    ys = np.asarray(ys)
    fig = plt.figure(figsize=(7, 6))
    ax = fig.add_subplot(111, projection="3d")
    ax.plot(ys[:, 0], ys[:, 1], ys[:, 2], lw=0.4)
    labels = (r"$\hat{x}$", r"$\hat{y}$", r"$\hat{z}$") if rotated else ("x", "y", "z")
    ax.set_xlabel(labels[0])
    ax.set_ylabel(labels[1])
    ax.set_zlabel(labels[2])
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)


def plot_section_scatter(uv, path, title: str = "Section crossings") -> str:
    uv = np.asarray(uv)
    fig, ax = plt.subplots(figsize=(7, 6))
    if uv.size:
        ax.plot(uv[:, 0], uv[:, 1], "b.", ms=2)
    ax.set_xlabel(r"$\hat{x}$")
    ax.set_ylabel(r"$\hat{y}$")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)


def plot_trap_overlay(seeds, clouds, quad_vertices, path) -> str:
    fig, ax = plt.subplots(figsize=(7, 6))
    for cloud in clouds:
        cloud = np.asarray(cloud)
        if cloud.size:
            ax.plot(cloud[:, 0], cloud[:, 1], "b.", ms=1.5)
    seeds = np.asarray(seeds)
    ax.plot(seeds[:, 0], seeds[:, 1], "r.", ms=1)
    v = np.asarray(quad_vertices)
    ring = np.vstack([v, v[:1]])
    ax.plot(ring[:, 0], ring[:, 1], "r-", lw=0.5, alpha=0.5)
    ax.set_xlabel(r"$\hat{x}$")
    ax.set_ylabel(r"$\hat{y}$")
    ax.set_title("Trapping region and iterated returns")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)


def plot_gah_demo(seeds, images, square, path) -> str:
    fig, ax = plt.subplots(figsize=(7, 6))
    seeds = np.asarray(seeds)
    images = np.asarray(images)
    ax.plot(seeds[:, 0], seeds[:, 1], "r.", ms=2, label="seeds")
    keep = ~np.isnan(images[:, 0])
    ax.plot(images[keep, 0], images[keep, 1], "b.", ms=2, label="full-rotation images")
    sq = np.array(
        [
            [square.r_min, square.z_min],
            [square.r_max, square.z_min],
            [square.r_max, square.z_max],
            [square.r_min, square.z_max],
            [square.r_min, square.z_min],
        ]
    )
    ax.plot(sq[:, 0], sq[:, 1], "k-", lw=0.8)
    ax.set_xlabel("r")
    ax.set_ylabel("z")
    ax.legend(loc="best")
    ax.set_title("Transversal square under one full rotation")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)


def plot_model_clouds(clouds, region, path) -> str:
    fig, ax = plt.subplots(figsize=(7, 6))
    for i, cloud in enumerate(clouds, start=1):
        cloud = np.asarray(cloud)
        ax.plot(cloud[:, 0], cloud[:, 1], ".", ms=1.2, label=f"iterate {i}")
    box = np.array(
        [
            [region.x_min, region.y_min],
            [region.x_max, region.y_min],
            [region.x_max, region.y_max],
            [region.x_min, region.y_max],
            [region.x_min, region.y_min],
        ]
    )
    ax.plot(box[:, 0], box[:, 1], "k-", lw=0.8)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.legend(loc="best", fontsize=8)
    ax.set_title("Planar horseshoe: iterated region")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return str(path)
