/**
 * Python-repr-compatible float formatting.
 *
 * Exported presets must byte-match the CLI's canonical config writer, which
 * formats floats with Python's shortest round-trip repr.  JavaScript's
 * String() is also shortest round-trip but differs in two places: integral
 * floats drop the ".0", and the scientific-notation window and exponent
 * padding differ.  This reproduces Python's choices for finite doubles.
 */
export function pyFloatRepr(v: number): string {
  if (!Number.isFinite(v)) {
    if (Number.isNaN(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
  }
  const a = Math.abs(v);
  // Python switches to scientific below 1e-4 and at/above 1e16.
  if (v !== 0 && (a < 1e-4 || a >= 1e16)) {
    return v
      .toExponential()
      .replace(/e([+-])(\d)$/, "e$10$2");
  }
  if (Number.isInteger(v)) {
    if (Object.is(v, -0)) return "-0.0";
    return `${v}.0`;
  }
  return String(v);
}
