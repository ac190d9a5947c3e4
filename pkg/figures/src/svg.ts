/**
 * Minimal SVG scene builder: linear scales, nice ticks, axes, polylines,
 * heatmap cells, and polar helpers.  Output is deterministic — element
 * order and number formatting depend only on the input data.
 */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const DEFAULT_MARGIN: Margin = { top: 36, right: 24, bottom: 46, left: 62 };

/** Stable short formatting for coordinates and labels. */
export function fmt(x: number): string {
  if (!Number.isFinite(x)) throw new RangeError(`non-finite coordinate ${x}`);
  if (x === 0) return "0";
  const s = Math.abs(x) >= 1e-4 && Math.abs(x) < 1e6
    ? x.toFixed(6)
    : x.toExponential(5);
  return s.replace(/\.?0+($|e)/, "$1");
}

export function esc(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function el(
  tag: string,
  attrs: Record<string, string | number>,
  children = "",
): string {
  const a = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : esc(v)}"`)
    .join(" ");
  return children === ""
    ? `<${tag} ${a}/>`
    : `<${tag} ${a}>${children}</${tag}>`;
}

export class LinearScale {
  constructor(
    readonly d0: number,
    readonly d1: number,
    readonly r0: number,
    readonly r1: number,
  ) {
    if (!(Number.isFinite(d0) && Number.isFinite(d1))) {
      throw new RangeError("scale domain must be finite");
    }
  }

  apply(x: number): number {
    const span = this.d1 - this.d0;
    const t = span === 0 ? 0.5 : (x - this.d0) / span;
    return this.r0 + t * (this.r1 - this.r0);
  }
}

/** Round ticks covering [lo, hi] at a 1/2/5 step, about n of them. */
export function niceTicks(lo: number, hi: number, n = 6): number[] {
  if (lo === hi) return [lo];
  const span = hi - lo;
  const raw = span / Math.max(n - 1, 1);
  const mag = 10 ** Math.floor(Math.log10(raw));
  const norm = raw / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

/** Pad a data extent by a fraction on both sides. */
export function padded(values: number[], frac = 0.06): [number, number] {
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = (hi - lo) * frac;
  return [lo - pad, hi + pad];
}

export function axisBottom(scale: LinearScale, y: number, label: string): string {
  const parts = [
    el("line", {
      x1: scale.r0, y1: y, x2: scale.r1, y2: y,
      stroke: "#333", "stroke-width": 1,
    }),
  ];
  for (const t of niceTicks(scale.d0, scale.d1)) {
    const x = scale.apply(t);
    parts.push(el("line", { x1: x, y1: y, x2: x, y2: y + 5, stroke: "#333" }));
    parts.push(el("text", {
      x, y: y + 18, "text-anchor": "middle", "font-size": 11, fill: "#333",
    }, esc(trimTick(t))));
  }
  const mid = (scale.r0 + scale.r1) / 2;
  parts.push(el("text", {
    x: mid, y: y + 34, "text-anchor": "middle", "font-size": 12, fill: "#111",
  }, esc(label)));
  return parts.join("");
}

export function axisLeft(scale: LinearScale, x: number, label: string): string {
  const parts = [
    el("line", {
      x1: x, y1: scale.r0, x2: x, y2: scale.r1,
      stroke: "#333", "stroke-width": 1,
    }),
  ];
  for (const t of niceTicks(scale.d0, scale.d1)) {
    const y = scale.apply(t);
    parts.push(el("line", { x1: x - 5, y1: y, x2: x, y2: y, stroke: "#333" }));
    parts.push(el("text", {
      x: x - 8, y: y + 4, "text-anchor": "end", "font-size": 11, fill: "#333",
    }, esc(trimTick(t))));
  }
  const midY = (scale.r0 + scale.r1) / 2;
  parts.push(el("text", {
    x: x - 46, y: midY, "text-anchor": "middle", "font-size": 12, fill: "#111",
    transform: `rotate(-90 ${fmt(x - 46)} ${fmt(midY)})`,
  }, esc(label)));
  return parts.join("");
}

function trimTick(t: number): string {
  const s = Math.abs(t) < 1e-12 ? "0" : String(Number(t.toPrecision(6)));
  return s;
}

export function polyline(
  xs: number[], ys: number[],
  attrs: Record<string, string | number>,
): string {
  const pts = xs.map((x, i) => `${fmt(x)},${fmt(ys[i]!)}`).join(" ");
  return el("polyline", { points: pts, fill: "none", ...attrs });
}

/** Five-anchor sequential color ramp (dark blue -> yellow), t in [0, 1]. */
export function rampColor(t: number): string {
  const anchors: [number, number, number][] = [
    [68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37],
  ];
  const u = Math.min(Math.max(t, 0), 1) * (anchors.length - 1);
  const i = Math.min(Math.floor(u), anchors.length - 2);
  const f = u - i;
  const a = anchors[i]!;
  const b = anchors[i + 1]!;
  const c = a.map((av, k) => Math.round(av + f * (b[k]! - av)));
  return `rgb(${c[0]},${c[1]},${c[2]})`;
}

/** Arrow as a line plus solid head, for group-velocity decoration. */
export function arrow(
  x: number, y: number, dx: number, dy: number, length: number,
  attrs: Record<string, string | number>,
): string {
  const n = Math.hypot(dx, dy);
  if (n === 0) return "";
  const ux = (dx / n) * length;
  const uy = (dy / n) * length;
  const x2 = x + ux;
  const y2 = y + uy;
  const head = length * 0.38;
  const hx = -ux / length;
  const hy = -uy / length;
  const px = -hy;
  const py = hx;
  const p1 = `${fmt(x2)},${fmt(y2)}`;
  const p2 = `${fmt(x2 + (hx + 0.45 * px) * head)},${fmt(y2 + (hy + 0.45 * py) * head)}`;
  const p3 = `${fmt(x2 + (hx - 0.45 * px) * head)},${fmt(y2 + (hy - 0.45 * py) * head)}`;
  return el("g", { class: String(attrs.class ?? "arrow") },
    el("line", { x1: x, y1: y, x2, y2, stroke: String(attrs.stroke ?? "#d62728"), "stroke-width": 1.2 }) +
    el("polygon", { points: `${p1} ${p2} ${p3}`, fill: String(attrs.stroke ?? "#d62728") }),
  );
}

export const SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/**
 * Wrap body markup in a standalone SVG document.  `comments` are embedded
 * verbatim as XML comments right after the opening tag (used to carry the
 * source artifacts' config headers into the figure file).
 */
export function svgDocument(
  width: number, height: number, body: string, comments: string[] = [],
): string {
  const safe = comments.map((c) => `<!-- ${c.replace(/--/g, "- -")} -->`).join("\n");
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
    safe,
    el("rect", { x: 0, y: 0, width, height, fill: "#ffffff" }),
    body,
    "</svg>",
    "",
  ].join("\n");
}
