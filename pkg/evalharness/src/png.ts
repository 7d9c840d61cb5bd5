import * as fs from "node:fs";
import { PNG } from "pngjs";

export interface GrayImage {
  width: number;
  height: number;
  /** row-major, one byte per pixel */
  pixels: Uint8Array;
}

/** Decode an 8-bit grayscale PNG. pngjs expands to RGBA; keep channel 0. */
export function readGray(path: string): GrayImage {
  const png = PNG.sync.read(fs.readFileSync(path));
  const n = png.width * png.height;
  const pixels = new Uint8Array(n);
  for (let i = 0; i < n; i++) {
    const r = png.data[i * 4];
    if (r !== png.data[i * 4 + 1] || r !== png.data[i * 4 + 2]) {
      throw new Error(`${path} is not grayscale at pixel ${i}`);
    }
    pixels[i] = r;
  }
  return { width: png.width, height: png.height, pixels };
}

/** Write an RGB PNG from a row-major buffer of 3 bytes per pixel. */
export function writeRgb(path: string, width: number, height: number, rgb: Uint8Array): void {
  if (rgb.length !== width * height * 3) {
    throw new Error(`buffer length ${rgb.length} does not match ${width}x${height} RGB`);
  }
  const png = new PNG({ width, height });
  for (let i = 0; i < width * height; i++) {
    png.data[i * 4] = rgb[i * 3];
    png.data[i * 4 + 1] = rgb[i * 3 + 1];
    png.data[i * 4 + 2] = rgb[i * 3 + 2];
    png.data[i * 4 + 3] = 255;
  }
  fs.writeFileSync(path, PNG.sync.write(png));
}
