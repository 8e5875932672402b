/**
 * Deterministic convolutional backbone with taps at strides 8 and 16.
 *
 * Pretrained weights are not bundled; the filters come from a fixed seeded
 * generator, so extraction is reproducible everywhere while keeping the
 * exact stride/tap structure a pretrained network would have (224 input ->
 * 28x28 second-stage grid, 256 -> 32x32). Replace the filter construction
 * when a real weight file is available.
 */
import * as tf from '@tensorflow/tfjs';

export const IMAGENET_MEAN = [0.485, 0.456, 0.406];
export const IMAGENET_STD = [0.229, 0.224, 0.225];

/** mulberry32: tiny deterministic PRNG, same stream on every platform. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

interface ConvSpec {
  name: string;
  size: number;
  inCh: number;
  outCh: number;
  stride: number;
}

const LAYERS: ConvSpec[] = [
  { name: 'stem', size: 7, inCh: 3, outCh: 32, stride: 2 },
  { name: 'stage1', size: 3, inCh: 32, outCh: 64, stride: 2 },
  { name: 'stage2', size: 3, inCh: 64, outCh: 128, stride: 2 },
  { name: 'stage3', size: 3, inCh: 128, outCh: 256, stride: 2 },
];

export class Backbone {
  readonly filters: tf.Tensor4D[];

  constructor(seed = 2718281) {
    const rand = mulberry32(seed);
    this.filters = LAYERS.map((spec) => {
      const fanIn = spec.size * spec.size * spec.inCh;
      const scale = Math.sqrt(2 / fanIn); // He init
      const values = new Float32Array(spec.size * spec.size * spec.inCh * spec.outCh);
      for (let i = 0; i < values.length; i++) {
        values[i] = (rand() * 2 - 1) * scale;
      }
      return tf.tensor4d(values, [spec.size, spec.size, spec.inCh, spec.outCh]);
    });
  }

  /**
   * Runs the stack on a normalized NHWC batch and returns the two tapped
   * stages: stage2 at stride 8 and stage3 at stride 16.
   */
  forward(input: tf.Tensor4D): { stage2: tf.Tensor4D; stage3: tf.Tensor4D } {
    return tf.tidy(() => {
      let x = input;
      let stage2: tf.Tensor4D | null = null;
      LAYERS.forEach((spec, i) => {
        x = tf.relu(tf.conv2d(x, this.filters[i], spec.stride, 'same'));
        if (spec.name === 'stage2') stage2 = x;
      });
      return { stage2: tf.keep(stage2!), stage3: tf.keep(x as tf.Tensor4D) };
    });
  }

  dispose(): void {
    this.filters.forEach((f) => f.dispose());
  }
}

export function normalize(image: tf.Tensor3D): tf.Tensor3D {
  return tf.tidy(() =>
    tf.div(tf.sub(image, tf.tensor1d(IMAGENET_MEAN)), tf.tensor1d(IMAGENET_STD)),
  ) as tf.Tensor3D;
}
