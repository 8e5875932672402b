/**
 * Folder extraction: every .png under the data directory (sorted, so runs
 * are reproducible) becomes a block of patch rows in one output .npy,
 * with a manifest mapping image ids to their row ranges. The manifest is
 * exactly what the streambank CLI accepts as --groups.
 */
import * as fs from 'fs';
import * as path from 'path';

import { Backbone } from './backbone';
import { CropMode, OUTPUT_DIM, extractImageFeatures } from './features';
import { NpyAppendWriter } from './npy';
import { loadPng } from './png';

export interface ExtractionConfig {
  dataDir: string;
  outFile: string;
  manifestFile: string;
  crop: CropMode;
  seed?: number;
}

export interface ManifestEntry {
  id: string;
  start: number;
  count: number;
}

export function listImages(dataDir: string): string[] {
  const found: string[] = [];
  const walk = (dir: string) => {
    for (const entry of fs.readdirSync(dir, { withFileTypes: true }).sort((a, b) =>
      a.name.localeCompare(b.name),
    )) {
      const full = path.join(dir, entry.name);
      if (entry.isDirectory()) walk(full);
      else if (entry.name.toLowerCase().endsWith('.png')) found.push(full);
    }
  };
  walk(dataDir);
  return found;
}

export async function extractFolder(config: ExtractionConfig): Promise<ManifestEntry[]> {
  const images = listImages(config.dataDir);
  if (images.length === 0) {
    throw new Error(`no .png images under ${config.dataDir}`);
  }
  const backbone = new Backbone(config.seed);
  const writer = new NpyAppendWriter(config.outFile, OUTPUT_DIM);
  const entries: ManifestEntry[] = [];
  try {
    for (const file of images) {
      const image = loadPng(file);
      const features = await extractImageFeatures(backbone, image, config.crop);
      const start = writer.appendRows(features.rows);
      entries.push({
        id: path.relative(config.dataDir, file).replace(/\\/g, '/'),
        start,
        count: features.gridHeight * features.gridWidth,
      });
    }
  } finally {
    writer.close();
    backbone.dispose();
  }
  fs.writeFileSync(
    config.manifestFile,
    JSON.stringify({ images: entries }, null, 2) + '\n',
  );
  return entries;
}
