// Display formatting. Every number in the UI is a service payload value
// run through fmt3 — three decimals, no client-side math beyond rounding.

export function fmt3(value: number): string {
  const text = value.toFixed(3);
  return text === "-0.000" ? "0.000" : text;
}

export type DeltaDirection = "drop" | "gain" | "flat";

/** Direction is judged at display precision so a delta rendered as
 * 0.000 never shows an arrow. */
export function deltaDirection(delta: number): DeltaDirection {
  const rounded = Number(fmt3(delta));
  if (rounded < 0) return "drop";
  if (rounded > 0) return "gain";
  return "flat";
}

export function deltaGlyph(direction: DeltaDirection): string {
  switch (direction) {
    case "drop":
      return "▼";
    case "gain":
      return "▲";
    case "flat":
      return "＝";
  }
}
