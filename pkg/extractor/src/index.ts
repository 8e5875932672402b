export { Backbone, mulberry32, normalize } from './backbone';
export {
  adaptiveAvgPool1d,
  extractImageFeatures,
  neighborhoodConcat,
  preprocess,
  OUTPUT_DIM,
} from './features';
export type { CropMode, PatchFeatures } from './features';
export { extractFolder, listImages } from './extract';
export type { ExtractionConfig, ManifestEntry } from './extract';
export { NpyAppendWriter, buildHeader, readNpy } from './npy';
export { loadPng, savePng } from './png';
export type { RgbImage } from './png';
