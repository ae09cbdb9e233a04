/** Embedded 5x7 bitmap font. Rendering text from a fixed table instead of
 * a system font keeps output images identical across machines. Glyphs are
 * 7 rows of 5 cells, 'X' = on. */

import { Color, Raster } from "./raster.js";

type Glyph = readonly string[];

const GLYPHS: Record<string, Glyph> = {
  " ": [".....", ".....", ".....", ".....", ".....", ".....", "....."],
  "0": [".XXX.", "X...X", "X..XX", "X.X.X", "XX..X", "X...X", ".XXX."],
  "1": ["..X..", ".XX..", "..X..", "..X..", "..X..", "..X..", ".XXX."],
  "2": [".XXX.", "X...X", "....X", "...X.", "..X..", ".X...", "XXXXX"],
  "3": [".XXX.", "X...X", "....X", "..XX.", "....X", "X...X", ".XXX."],
  "4": ["...X.", "..XX.", ".X.X.", "X..X.", "XXXXX", "...X.", "...X."],
  "5": ["XXXXX", "X....", "XXXX.", "....X", "....X", "X...X", ".XXX."],
  "6": ["..XX.", ".X...", "X....", "XXXX.", "X...X", "X...X", ".XXX."],
  "7": ["XXXXX", "....X", "...X.", "..X..", "..X..", "..X..", "..X.."],
  "8": [".XXX.", "X...X", "X...X", ".XXX.", "X...X", "X...X", ".XXX."],
  "9": [".XXX.", "X...X", "X...X", ".XXXX", "....X", "...X.", ".XX.."],
  A: [".XXX.", "X...X", "X...X", "XXXXX", "X...X", "X...X", "X...X"],
  B: ["XXXX.", "X...X", "X...X", "XXXX.", "X...X", "X...X", "XXXX."],
  C: [".XXX.", "X...X", "X....", "X....", "X....", "X...X", ".XXX."],
  D: ["XXXX.", "X...X", "X...X", "X...X", "X...X", "X...X", "XXXX."],
  E: ["XXXXX", "X....", "X....", "XXXX.", "X....", "X....", "XXXXX"],
  F: ["XXXXX", "X....", "X....", "XXXX.", "X....", "X....", "X...."],
  G: [".XXX.", "X...X", "X....", "X.XXX", "X...X", "X...X", ".XXXX"],
  H: ["X...X", "X...X", "X...X", "XXXXX", "X...X", "X...X", "X...X"],
  I: [".XXX.", "..X..", "..X..", "..X..", "..X..", "..X..", ".XXX."],
  J: ["..XXX", "...X.", "...X.", "...X.", "...X.", "X..X.", ".XX.."],
  K: ["X...X", "X..X.", "X.X..", "XX...", "X.X..", "X..X.", "X...X"],
  L: ["X....", "X....", "X....", "X....", "X....", "X....", "XXXXX"],
  M: ["X...X", "XX.XX", "X.X.X", "X.X.X", "X...X", "X...X", "X...X"],
  N: ["X...X", "XX..X", "X.X.X", "X..XX", "X...X", "X...X", "X...X"],
  O: [".XXX.", "X...X", "X...X", "X...X", "X...X", "X...X", ".XXX."],
  P: ["XXXX.", "X...X", "X...X", "XXXX.", "X....", "X....", "X...."],
  Q: [".XXX.", "X...X", "X...X", "X...X", "X.X.X", "X..X.", ".XX.X"],
  R: ["XXXX.", "X...X", "X...X", "XXXX.", "X.X..", "X..X.", "X...X"],
  S: [".XXXX", "X....", "X....", ".XXX.", "....X", "....X", "XXXX."],
  T: ["XXXXX", "..X..", "..X..", "..X..", "..X..", "..X..", "..X.."],
  U: ["X...X", "X...X", "X...X", "X...X", "X...X", "X...X", ".XXX."],
  V: ["X...X", "X...X", "X...X", "X...X", "X...X", ".X.X.", "..X.."],
  W: ["X...X", "X...X", "X...X", "X.X.X", "X.X.X", "XX.XX", "X...X"],
  X: ["X...X", "X...X", ".X.X.", "..X..", ".X.X.", "X...X", "X...X"],
  Y: ["X...X", "X...X", ".X.X.", "..X..", "..X..", "..X..", "..X.."],
  Z: ["XXXXX", "....X", "...X.", "..X..", ".X...", "X....", "XXXXX"],
  a: [".....", ".....", ".XXX.", "....X", ".XXXX", "X...X", ".XXXX"],
  b: ["X....", "X....", "XXXX.", "X...X", "X...X", "X...X", "XXXX."],
  c: [".....", ".....", ".XXX.", "X....", "X....", "X...X", ".XXX."],
  d: ["....X", "....X", ".XXXX", "X...X", "X...X", "X...X", ".XXXX"],
  e: [".....", ".....", ".XXX.", "X...X", "XXXXX", "X....", ".XXX."],
  f: ["..XX.", ".X..X", ".X...", "XXX..", ".X...", ".X...", ".X..."],
  g: [".....", ".XXXX", "X...X", "X...X", ".XXXX", "....X", ".XXX."],
  h: ["X....", "X....", "XXXX.", "X...X", "X...X", "X...X", "X...X"],
  i: ["..X..", ".....", ".XX..", "..X..", "..X..", "..X..", ".XXX."],
  j: ["...X.", ".....", "..XX.", "...X.", "...X.", "X..X.", ".XX.."],
  k: ["X....", "X....", "X..X.", "X.X..", "XX...", "X.X..", "X..X."],
  l: [".XX..", "..X..", "..X..", "..X..", "..X..", "..X..", ".XXX."],
  m: [".....", ".....", "XX.X.", "X.X.X", "X.X.X", "X.X.X", "X.X.X"],
  n: [".....", ".....", "XXXX.", "X...X", "X...X", "X...X", "X...X"],
  o: [".....", ".....", ".XXX.", "X...X", "X...X", "X...X", ".XXX."],
  p: [".....", "XXXX.", "X...X", "X...X", "XXXX.", "X....", "X...."],
  q: [".....", ".XXXX", "X...X", "X...X", ".XXXX", "....X", "....X"],
  r: [".....", ".....", "X.XX.", "XX..X", "X....", "X....", "X...."],
  s: [".....", ".....", ".XXXX", "X....", ".XXX.", "....X", "XXXX."],
  t: [".X...", ".X...", "XXX..", ".X...", ".X...", ".X..X", "..XX."],
  u: [".....", ".....", "X...X", "X...X", "X...X", "X..XX", ".XX.X"],
  v: [".....", ".....", "X...X", "X...X", "X...X", ".X.X.", "..X.."],
  w: [".....", ".....", "X...X", "X...X", "X.X.X", "X.X.X", ".X.X."],
  x: [".....", ".....", "X...X", ".X.X.", "..X..", ".X.X.", "X...X"],
  y: [".....", ".....", "X...X", "X...X", ".XXXX", "....X", ".XXX."],
  z: [".....", ".....", "XXXXX", "...X.", "..X..", ".X...", "XXXXX"],
  ".": [".....", ".....", ".....", ".....", ".....", ".XX..", ".XX.."],
  ",": [".....", ".....", ".....", ".....", ".XX..", "..X..", ".X..."],
  "-": [".....", ".....", ".....", "XXXXX", ".....", ".....", "....."],
  "+": [".....", "..X..", "..X..", "XXXXX", "..X..", "..X..", "....."],
  "=": [".....", ".....", "XXXXX", ".....", "XXXXX", ".....", "....."],
  "/": ["....X", "....X", "...X.", "..X..", ".X...", "X....", "X...."],
  "(": ["...X.", "..X..", ".X...", ".X...", ".X...", "..X..", "...X."],
  ")": [".X...", "..X..", "...X.", "...X.", "...X.", "..X..", ".X..."],
  "[": [".XXX.", ".X...", ".X...", ".X...", ".X...", ".X...", ".XXX."],
  "]": [".XXX.", "...X.", "...X.", "...X.", "...X.", "...X.", ".XXX."],
  ":": [".....", ".XX..", ".XX..", ".....", ".XX..", ".XX..", "....."],
  _: [".....", ".....", ".....", ".....", ".....", ".....", "XXXXX"],
  "%": ["XX...", "XX..X", "...X.", "..X..", ".X...", "X..XX", "...XX"],
  "*": [".....", ".X.X.", "..X..", "XXXXX", "..X..", ".X.X.", "....."],
  "'": ["..X..", "..X..", ".....", ".....", ".....", ".....", "....."],
  "<": ["...X.", "..X..", ".X...", "X....", ".X...", "..X..", "...X."],
  ">": [".X...", "..X..", "...X.", "....X", "...X.", "..X..", ".X..."],
  "|": ["..X..", "..X..", "..X..", "..X..", "..X..", "..X..", "..X.."],
  "^": ["..X..", ".X.X.", "X...X", ".....", ".....", ".....", "....."],
  "?": [".XXX.", "X...X", "....X", "...X.", "..X..", ".....", "..X.."],
};

export const GLYPH_WIDTH = 5;
export const GLYPH_HEIGHT = 7;
const ADVANCE = GLYPH_WIDTH + 1;

export function textWidth(text: string, scale: number): number {
  if (text.length === 0) return 0;
  return (text.length * ADVANCE - 1) * scale;
}

export function textHeight(scale: number): number {
  return GLYPH_HEIGHT * scale;
}

/** Draw `text` with its top-left corner at (x, y). `vertical` rotates the
 * whole string 90 degrees counter-clockwise (reads bottom to top), with
 * (x, y) the top-left corner of the rotated bounding box. */
export function drawText(raster: Raster, x: number, y: number, text: string,
                         scale: number, color: Color, vertical = false): void {
  let penX = x;
  let penY = vertical ? y + textWidth(text, scale) : y;
  for (const ch of text) {
    const glyph = GLYPHS[ch] ?? GLYPHS["?"];
    for (let row = 0; row < GLYPH_HEIGHT; row++) {
      for (let col = 0; col < GLYPH_WIDTH; col++) {
        if (glyph[row][col] !== "X") continue;
        for (let sy = 0; sy < scale; sy++) {
          for (let sx = 0; sx < scale; sx++) {
            if (vertical) {
              raster.blend(penX + row * scale + sy,
                           penY - col * scale - sx, color);
            } else {
              raster.blend(penX + col * scale + sx,
                           penY + row * scale + sy, color);
            }
          }
        }
      }
    }
    if (vertical) {
      penY -= ADVANCE * scale;
    } else {
      penX += ADVANCE * scale;
    }
  }
}
