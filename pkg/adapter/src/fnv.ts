/** 64-bit FNV-1a over UTF-8 bytes, matching the Python harness bit for bit. */

const MASK64 = (1n << 64n) - 1n;

export const FNV_OFFSET_BASIS = 0xcbf29ce484222325n;
export const FNV_PRIME = 0x100000001b3n;

export function fnv1a64(data: Uint8Array): bigint {
  let hash = FNV_OFFSET_BASIS;
  for (const byte of data) {
    hash ^= BigInt(byte);
    hash = (hash * FNV_PRIME) & MASK64;
  }
  return hash;
}

export function fnv1a64String(text: string): bigint {
  return fnv1a64(Buffer.from(text, "utf8"));
}
