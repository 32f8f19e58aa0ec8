/**
 * CEVB embedding file codec (bit-exact, little-endian throughout).
 *
 * Layout: magic "CEVB"; u32 version = 1; u64 row count; u32 dim;
 * u8 dtype = 0 (f32); per row a u16 id byte length + UTF-8 id bytes;
 * then all values as row-major f32.
 */

export const CEVB_MAGIC = Buffer.from("CEVB", "ascii");
export const CEVB_VERSION = 1;

export class CevbError extends Error {}

export interface EmbeddingMatrix {
  ids: string[];
  dim: number;
  /** Row-major values, rows.length === ids.length. */
  rows: Float32Array[];
}

function checkMatrix(matrix: EmbeddingMatrix): void {
  if (matrix.ids.length !== matrix.rows.length) {
    throw new CevbError(
      `${matrix.ids.length} ids but ${matrix.rows.length} rows`,
    );
  }
  if (new Set(matrix.ids).size !== matrix.ids.length) {
    throw new CevbError("duplicate ids in embedding matrix");
  }
  for (let i = 0; i < matrix.rows.length; i++) {
    if (matrix.rows[i].length !== matrix.dim) {
      throw new CevbError(
        `row ${i} has dim ${matrix.rows[i].length}, expected ${matrix.dim}`,
      );
    }
    for (const value of matrix.rows[i]) {
      if (!Number.isFinite(value)) {
        throw new CevbError("non-finite values in embedding matrix");
      }
    }
  }
}

export function encodeCevb(matrix: EmbeddingMatrix): Buffer {
  checkMatrix(matrix);
  const idBlobs = matrix.ids.map((id) => Buffer.from(id, "utf8"));
  for (const blob of idBlobs) {
    if (blob.length > 0xffff) {
      throw new CevbError("id too long for CEVB");
    }
  }
  const headerSize = 4 + 4 + 8 + 4 + 1;
  const idsSize = idBlobs.reduce((total, blob) => total + 2 + blob.length, 0);
  const valuesSize = matrix.ids.length * matrix.dim * 4;
  const out = Buffer.alloc(headerSize + idsSize + valuesSize);

  let offset = 0;
  CEVB_MAGIC.copy(out, offset);
  offset += 4;
  out.writeUInt32LE(CEVB_VERSION, offset);
  offset += 4;
  out.writeBigUInt64LE(BigInt(matrix.ids.length), offset);
  offset += 8;
  out.writeUInt32LE(matrix.dim, offset);
  offset += 4;
  out.writeUInt8(0, offset);
  offset += 1;
  for (const blob of idBlobs) {
    out.writeUInt16LE(blob.length, offset);
    offset += 2;
    blob.copy(out, offset);
    offset += blob.length;
  }
  for (const row of matrix.rows) {
    for (const value of row) {
      out.writeFloatLE(value, offset);
      offset += 4;
    }
  }
  return out;
}

export function decodeCevb(data: Buffer): EmbeddingMatrix {
  if (data.length < 21 || !data.subarray(0, 4).equals(CEVB_MAGIC)) {
    throw new CevbError(`bad magic: ${data.subarray(0, 4).toString("latin1")}`);
  }
  let offset = 4;
  const version = data.readUInt32LE(offset);
  offset += 4;
  if (version !== CEVB_VERSION) {
    throw new CevbError(`unsupported CEVB version: ${version}`);
  }
  const count = Number(data.readBigUInt64LE(offset));
  offset += 8;
  const dim = data.readUInt32LE(offset);
  offset += 4;
  const dtype = data.readUInt8(offset);
  offset += 1;
  if (dtype !== 0) {
    throw new CevbError(`unsupported CEVB dtype: ${dtype}`);
  }
  const ids: string[] = [];
  for (let i = 0; i < count; i++) {
    const length = data.readUInt16LE(offset);
    offset += 2;
    ids.push(data.subarray(offset, offset + length).toString("utf8"));
    offset += length;
  }
  if (new Set(ids).size !== ids.length) {
    throw new CevbError("duplicate ids in CEVB file");
  }
  const expected = count * dim * 4;
  if (data.length - offset !== expected) {
    throw new CevbError(
      `truncated CEVB payload: ${data.length - offset} of ${expected} bytes`,
    );
  }
  const rows: Float32Array[] = [];
  for (let i = 0; i < count; i++) {
    const row = new Float32Array(dim);
    for (let j = 0; j < dim; j++) {
      row[j] = data.readFloatLE(offset);
      offset += 4;
      if (!Number.isFinite(row[j])) {
        throw new CevbError("non-finite values in CEVB file");
      }
    }
    rows.push(row);
  }
  return { ids, dim, rows };
}
