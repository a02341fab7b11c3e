/** Perceptually uniform colormap plus linear/log probability normalization. */

const VIRIDIS_ANCHORS: [number, number, number][] = [
  [68, 1, 84],
  [72, 40, 120],
  [62, 74, 137],
  [49, 104, 142],
  [38, 130, 142],
  [31, 158, 137],
  [53, 183, 121],
  [109, 205, 89],
  [253, 231, 37],
];

/** Map u in [0, 1] to an RGB triple. */
export function viridis(u: number): [number, number, number] {
  const x = Math.min(1, Math.max(0, u)) * (VIRIDIS_ANCHORS.length - 1);
  const i = Math.min(VIRIDIS_ANCHORS.length - 2, Math.floor(x));
  const f = x - i;
  const a = VIRIDIS_ANCHORS[i];
  const b = VIRIDIS_ANCHORS[i + 1];
  return [
    Math.round(a[0] + f * (b[0] - a[0])),
    Math.round(a[1] + f * (b[1] - a[1])),
    Math.round(a[2] + f * (b[2] - a[2])),
  ];
}

export interface ColorScale {
  kind: "linear" | "log";
  /** log floor: values at/below it map to 0 */
  floor: number;
  /** shared maximum across all panels of a figure */
  vmax: number;
}

export function normalize(value: number, scale: ColorScale): number {
  if (scale.kind === "linear") {
    return scale.vmax > 0 ? value / scale.vmax : 0;
  }
  const lo = Math.log10(scale.floor);
  const hi = Math.log10(Math.max(scale.vmax, scale.floor * 10));
  const v = Math.log10(Math.max(value, scale.floor));
  return (v - lo) / (hi - lo);
}
