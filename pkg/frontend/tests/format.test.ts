import { describe, expect, it } from "vitest";

import { deltaDirection, deltaGlyph, fmt3 } from "../src/format";

describe("fmt3", () => {
  it("renders three decimals", () => {
    expect(fmt3(0.032451)).toBe("0.032");
    expect(fmt3(-0.194456)).toBe("-0.194");
    expect(fmt3(1)).toBe("1.000");
  });

  it("never shows negative zero", () => {
    expect(fmt3(-1e-18)).toBe("0.000");
    expect(fmt3(-0)).toBe("0.000");
    expect(fmt3(0)).toBe("0.000");
  });
});

describe("deltaDirection", () => {
  it("judges at display precision", () => {
    expect(deltaDirection(-0.2)).toBe("drop");
    expect(deltaDirection(0.01)).toBe("gain");
    expect(deltaDirection(-1e-9)).toBe("flat");
    expect(deltaDirection(0.0004)).toBe("flat");
  });

  it("maps to glyphs", () => {
    expect(deltaGlyph("drop")).toBe("▼");
    expect(deltaGlyph("gain")).toBe("▲");
    expect(deltaGlyph("flat")).toBe("＝");
  });
});
