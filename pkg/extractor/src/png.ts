/** PNG decoding to float RGB tensors in [0, 1], HWC layout. */
import * as fs from 'fs';
import { PNG } from 'pngjs';

export interface RgbImage {
  height: number;
  width: number;
  /** height * width * 3 values in [0, 1], HWC */
  data: Float32Array;
}

export function loadPng(path: string): RgbImage {
  const png = PNG.sync.read(fs.readFileSync(path));
  const { width, height } = png;
  const out = new Float32Array(height * width * 3);
  for (let i = 0; i < height * width; i++) {
    out[i * 3] = png.data[i * 4] / 255;
    out[i * 3 + 1] = png.data[i * 4 + 1] / 255;
    out[i * 3 + 2] = png.data[i * 4 + 2] / 255;
  }
  return { height, width, data: out };
}

export function savePng(path: string, image: RgbImage): void {
  const png = new PNG({ width: image.width, height: image.height });
  for (let i = 0; i < image.height * image.width; i++) {
    png.data[i * 4] = Math.round(image.data[i * 3] * 255);
    png.data[i * 4 + 1] = Math.round(image.data[i * 3 + 1] * 255);
    png.data[i * 4 + 2] = Math.round(image.data[i * 3 + 2] * 255);
    png.data[i * 4 + 3] = 255;
  }
  fs.writeFileSync(path, PNG.sync.write(png));
}
