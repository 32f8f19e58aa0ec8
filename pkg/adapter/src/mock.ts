/**
 * Bag-of-words mock encoder, mirroring the Python harness exactly.
 *
 * Same tokenizer (maximal letter/digit/apostrophe runs, lone punctuation),
 * same FNV-1a 64 coordinate/sign derivation, same float64 accumulation and
 * L2 normalization, same float32 rounding on store. The accumulation sums
 * small integers, so intermediate results are exact and the emitted rows
 * are bit-identical across both implementations.
 */

import { fnv1a64String } from "./fnv";

export const MOCK_DIM = 256;

// Letters and digits per Unicode categories L* and N*, mirroring Python's
// [^\W_]; every other non-space character stands alone.
const TOKEN_RE = /(?:[\p{L}\p{N}'])+|\S/gu;

export function tokenize(text: string): string[] {
  return [...text.matchAll(TOKEN_RE)].map((match) => match[0]);
}

export function mockEncode(text: string): Float32Array {
  const accum = new Float64Array(MOCK_DIM);
  for (const token of tokenize(text)) {
    const hash = fnv1a64String(token.toLowerCase());
    const index = Number(hash % BigInt(MOCK_DIM));
    const sign = hash >> 63n === 0n ? 1.0 : -1.0;
    accum[index] += sign;
  }
  let normSq = 0.0;
  for (let i = 0; i < MOCK_DIM; i++) {
    normSq += accum[i] * accum[i];
  }
  const row = new Float32Array(MOCK_DIM);
  if (normSq > 0.0) {
    const norm = Math.sqrt(normSq);
    for (let i = 0; i < MOCK_DIM; i++) {
      row[i] = accum[i] / norm; // f64 divide, f32 rounding on store
    }
  }
  return row;
}
