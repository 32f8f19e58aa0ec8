import { describe, expect, it } from "vitest";

import { MOCK_DIM, mockEncode, tokenize } from "../src/mock";

describe("tokenize", () => {
  it("keeps apostrophe words together and isolates punctuation", () => {
    expect(tokenize("man, running!")).toEqual(["man", ",", "running", "!"]);
    expect(tokenize("it's the dog's ball")).toEqual(["it's", "the", "dog's", "ball"]);
  });

  it("handles empty and unicode text", () => {
    expect(tokenize("")).toEqual([]);
    expect(tokenize("café 猫 🐱 2cats")).toEqual(["café", "猫", "🐱", "2cats"]);
  });

  it("treats underscores as punctuation", () => {
    expect(tokenize("a_b")).toEqual(["a", "_", "b"]);
  });
});

describe("mockEncode", () => {
  it("returns the zero vector for empty text", () => {
    const row = mockEncode("");
    expect(row.length).toBe(MOCK_DIM);
    expect(row.every((value) => value === 0)).toBe(true);
  });

  it("places tokens at their FNV coordinates with hash-bit signs", () => {
    // frozen from the shared reference: "a" -> 140 (negative), "guy" -> 80 (negative)
    const row = mockEncode("a guy");
    const nonzero = [...row.keys()].filter((i) => row[i] !== 0);
    expect(nonzero).toEqual([80, 140]);
    const inv = Math.fround(-1 / Math.sqrt(2));
    expect(row[80]).toBe(inv);
    expect(row[140]).toBe(inv);
  });

  it("is invariant to token order and repetition scaling", () => {
    const a = mockEncode("a guy wearing a red shirt");
    const b = mockEncode("shirt red a wearing guy a");
    expect(Array.from(a)).toEqual(Array.from(b));
    expect(Array.from(mockEncode("dog"))).toEqual(Array.from(mockEncode("dog dog")));
  });

  it("lowercases before hashing", () => {
    expect(Array.from(mockEncode("DOG Runs"))).toEqual(Array.from(mockEncode("dog runs")));
  });

  it("emits unit-norm rows", () => {
    const row = mockEncode("a small bird sings near the river");
    let norm = 0;
    for (const value of row) {
      norm += value * value;
    }
    expect(Math.abs(Math.sqrt(norm) - 1)).toBeLessThan(1e-6);
  });
});
