#!/usr/bin/env node
/**
 * streambank-extract --data <dir> --out <file.npy> --manifest <file.json>
 *                    [--crop center224|none]
 */
import { extractFolder } from './extract';
import { CropMode } from './features';

function parseArgs(argv: string[]): Map<string, string> {
  const args = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    if (!argv[i].startsWith('--') || i + 1 >= argv.length) {
      throw new Error(`expected --flag value pairs, got ${argv[i]}`);
    }
    args.set(argv[i].slice(2), argv[i + 1]);
  }
  return args;
}

async function main(): Promise<number> {
  const args = parseArgs(process.argv.slice(2));
  const dataDir = args.get('data');
  const outFile = args.get('out');
  const manifestFile = args.get('manifest');
  const crop = (args.get('crop') ?? 'center224') as CropMode;
  if (!dataDir || !outFile || !manifestFile) {
    console.error(
      'usage: streambank-extract --data <dir> --out <file.npy> --manifest <file.json> [--crop center224|none]',
    );
    return 2;
  }
  if (crop !== 'center224' && crop !== 'none') {
    console.error(`unknown crop mode ${crop}`);
    return 2;
  }
  const entries = await extractFolder({ dataDir, outFile, manifestFile, crop });
  const rows = entries.reduce((acc, e) => acc + e.count, 0);
  console.log(JSON.stringify({ images: entries.length, rows, out: outFile }));
  return 0;
}

main().then(
  (code) => process.exit(code),
  (err) => {
    console.error(`error: ${err.message}`);
    process.exit(1);
  },
);
