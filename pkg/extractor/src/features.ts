/**
 * Patch-feature pipeline: resize (optionally center-crop), run the
 * backbone, bring both tapped stages onto the stride-8 grid, concatenate
 * each position's 3x3 neighborhood, resample each layer's vector to 1024
 * channels, then resample the concatenated pair back to 1024.
 *
 * A 256->224 center crop yields a 28x28 grid (784 rows per image); 256
 * without cropping yields 32x32 (1024 rows). Every row has 1024 features.
 */
import * as tf from '@tensorflow/tfjs';

import { Backbone, normalize } from './backbone';
import { RgbImage } from './png';

export const OUTPUT_DIM = 1024;
export type CropMode = 'center224' | 'none';

/** PyTorch-style adaptive average pooling over the last axis. */
export function adaptiveAvgPool1d(
  input: Float32Array,
  length: number,
  outLength: number,
): Float32Array {
  const rows = input.length / length;
  const out = new Float32Array(rows * outLength);
  for (let r = 0; r < rows; r++) {
    const base = r * length;
    for (let i = 0; i < outLength; i++) {
      const start = Math.floor((i * length) / outLength);
      const end = Math.ceil(((i + 1) * length) / outLength);
      let acc = 0;
      for (let j = start; j < end; j++) acc += input[base + j];
      out[r * outLength + i] = acc / (end - start);
    }
  }
  return out;
}

/** Concatenate each spatial position's 3x3 neighborhood along channels. */
export function neighborhoodConcat(x: tf.Tensor4D): tf.Tensor4D {
  return tf.tidy(() => {
    const [, h, w] = x.shape;
    const padded = tf.pad(x, [
      [0, 0],
      [1, 1],
      [1, 1],
      [0, 0],
    ]);
    const shifts: tf.Tensor4D[] = [];
    for (let dy = 0; dy < 3; dy++) {
      for (let dx = 0; dx < 3; dx++) {
        shifts.push(tf.slice(padded, [0, dy, dx, 0], [1, h, w, -1]));
      }
    }
    return tf.concat(shifts, 3) as tf.Tensor4D;
  });
}

export function preprocess(image: RgbImage, crop: CropMode): tf.Tensor4D {
  return tf.tidy(() => {
    let x = tf.tensor3d(image.data, [image.height, image.width, 3]);
    x = tf.image.resizeBilinear(x, [256, 256]);
    if (crop === 'center224') {
      x = tf.slice(x, [16, 16, 0], [224, 224, 3]);
    }
    return tf.expandDims(normalize(x), 0) as tf.Tensor4D;
  });
}

export interface PatchFeatures {
  /** grid * grid rows of OUTPUT_DIM values, raster order */
  rows: Float32Array;
  gridHeight: number;
  gridWidth: number;
}

export async function extractImageFeatures(
  backbone: Backbone,
  image: RgbImage,
  crop: CropMode,
): Promise<PatchFeatures> {
  const input = preprocess(image, crop);
  const { stage2, stage3 } = backbone.forward(input);
  input.dispose();
  const [, h, w, c2] = stage2.shape;
  const stage3up = tf.tidy(
    () => tf.image.resizeBilinear(stage3, [h, w]) as tf.Tensor4D,
  );
  stage3.dispose();
  const hood2 = neighborhoodConcat(stage2);
  const hood3 = neighborhoodConcat(stage3up);
  stage2.dispose();
  stage3up.dispose();
  const c3 = hood3.shape[3] / 9;
  const raw2 = (await hood2.data()) as Float32Array;
  const raw3 = (await hood3.data()) as Float32Array;
  hood2.dispose();
  hood3.dispose();

  const pooled2 = adaptiveAvgPool1d(raw2, 9 * c2, OUTPUT_DIM);
  const pooled3 = adaptiveAvgPool1d(raw3, 9 * c3, OUTPUT_DIM);
  const joined = new Float32Array(h * w * 2 * OUTPUT_DIM);
  for (let p = 0; p < h * w; p++) {
    joined.set(pooled2.subarray(p * OUTPUT_DIM, (p + 1) * OUTPUT_DIM), p * 2 * OUTPUT_DIM);
    joined.set(
      pooled3.subarray(p * OUTPUT_DIM, (p + 1) * OUTPUT_DIM),
      p * 2 * OUTPUT_DIM + OUTPUT_DIM,
    );
  }
  const rows = adaptiveAvgPool1d(joined, 2 * OUTPUT_DIM, OUTPUT_DIM);
  return { rows, gridHeight: h, gridWidth: w };
}
