/**
 * Capture "pictures" are embeddings, not images, so the film roll renders
 * an identicon-style glyph derived from each sample's content hash: same
 * sample, same glyph, which makes repeated faces visually obvious.
 */

export interface Glyph {
  cells: boolean[]; // 5x5, row-major
  hue: number; // 0..359
}

const GRID = 5;

export function glyphFromRef(sampleRef: string): Glyph {
  if (!sampleRef) {
    return { cells: new Array(GRID * GRID).fill(false), hue: 0 };
  }
  const bytes: number[] = [];
  for (let i = 0; i + 1 < sampleRef.length && bytes.length < 16; i += 2) {
    bytes.push(parseInt(sampleRef.slice(i, i + 2), 16) || 0);
  }
  while (bytes.length < 16) bytes.push(0);

  const cells = new Array(GRID * GRID).fill(false);
  // Fill the left three columns from hash bits, mirror them to the right.
  let bit = 0;
  for (let row = 0; row < GRID; row++) {
    for (let col = 0; col < 3; col++) {
      const byte = bytes[Math.floor(bit / 8) % 16];
      const on = ((byte >> (bit % 8)) & 1) === 1;
      cells[row * GRID + col] = on;
      cells[row * GRID + (GRID - 1 - col)] = on;
      bit++;
    }
  }
  const hue = ((bytes[14] << 8) | bytes[15]) % 360;
  return { cells, hue };
}

export function glyphSvg(sampleRef: string, size = 36, nonOwner = false): string {
  const glyph = glyphFromRef(sampleRef);
  const cell = size / GRID;
  const color = nonOwner ? "#d64541" : `hsl(${glyph.hue}, 45%, 55%)`;
  const rects: string[] = [];
  glyph.cells.forEach((on, i) => {
    if (!on) return;
    const x = (i % GRID) * cell;
    const y = Math.floor(i / GRID) * cell;
    rects.push(`<rect x="${x}" y="${y}" width="${cell}" height="${cell}" fill="${color}"/>`);
  });
  return `<svg class="glyph" viewBox="0 0 ${size} ${size}" width="${size}" height="${size}">` +
    `<rect width="${size}" height="${size}" fill="#f2f2ef"/>${rects.join("")}</svg>`;
}
