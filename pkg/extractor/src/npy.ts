/**
 * Minimal .npy (format 1.0) support: little-endian float32, C-order, 2-D.
 * Matches the subset the streambank CLI reads: rows are vectors on disk.
 *
 * NpyAppendWriter reserves a fixed 128-byte header region so rows can be
 * appended image by image; the real header (with the final row count) is
 * patched in at close. 128 is a multiple of the format's 64-byte data
 * alignment and fits any row count.
 */
import * as fs from 'fs';

const MAGIC = Buffer.from('\x93NUMPY', 'latin1');
const HEADER_SPACE = 128;

export function buildHeader(rows: number, cols: number): Buffer {
  const dict = `{'descr': '<f4', 'fortran_order': False, 'shape': (${rows}, ${cols}), }`;
  const unpadded = MAGIC.length + 2 + 2 + dict.length + 1;
  if (unpadded > HEADER_SPACE) {
    throw new Error(`header does not fit in ${HEADER_SPACE} bytes: ${dict}`);
  }
  const body = dict + ' '.repeat(HEADER_SPACE - unpadded) + '\n';
  const head = Buffer.alloc(HEADER_SPACE);
  MAGIC.copy(head, 0);
  head[6] = 1; // version 1.0
  head[7] = 0;
  head.writeUInt16LE(body.length, 8);
  head.write(body, 10, 'latin1');
  return head;
}

export class NpyAppendWriter {
  private fd: number;
  private rows = 0;
  private closed = false;

  constructor(readonly path: string, readonly cols: number) {
    this.fd = fs.openSync(path, 'w');
    fs.writeSync(this.fd, Buffer.alloc(HEADER_SPACE));
  }

  appendRows(block: Float32Array): number {
    if (this.closed) throw new Error('writer is closed');
    if (block.length % this.cols !== 0) {
      throw new Error(`block of ${block.length} values is not a multiple of ${this.cols}`);
    }
    const start = this.rows;
    const buf = Buffer.alloc(block.length * 4);
    for (let i = 0; i < block.length; i++) buf.writeFloatLE(block[i], i * 4);
    fs.writeSync(this.fd, buf);
    this.rows += block.length / this.cols;
    return start;
  }

  close(): number {
    if (this.closed) return this.rows;
    fs.writeSync(this.fd, buildHeader(this.rows, this.cols), 0, HEADER_SPACE, 0);
    fs.closeSync(this.fd);
    this.closed = true;
    return this.rows;
  }
}

/** Test-side reader; validates the fields the Python consumer checks. */
export function readNpy(path: string): { shape: [number, number]; data: Float32Array } {
  const raw = fs.readFileSync(path);
  if (!raw.subarray(0, 6).equals(MAGIC)) throw new Error('bad magic');
  if (raw[6] !== 1 || raw[7] !== 0) throw new Error(`unsupported version ${raw[6]}.${raw[7]}`);
  const hlen = raw.readUInt16LE(8);
  const dict = raw.subarray(10, 10 + hlen).toString('latin1');
  const m = dict.match(/'descr':\s*'([^']+)',\s*'fortran_order':\s*(\w+),\s*'shape':\s*\((\d+),\s*(\d+)\)/);
  if (!m) throw new Error(`unparseable header: ${dict}`);
  if (m[1] !== '<f4') throw new Error(`unsupported descr ${m[1]}`);
  if (m[2] !== 'False') throw new Error('fortran_order must be False');
  const rows = parseInt(m[3], 10);
  const cols = parseInt(m[4], 10);
  const data = new Float32Array(rows * cols);
  const offset = 10 + hlen;
  if (raw.length - offset < rows * cols * 4) throw new Error('truncated data');
  for (let i = 0; i < data.length; i++) data[i] = raw.readFloatLE(offset + i * 4);
  return { shape: [rows, cols], data };
}
