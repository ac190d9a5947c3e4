/**
 * Figure recipes: each maps one or more CLI CSV artifacts onto an SVG.
 *
 * Recipes are pure plumbing — every number they draw comes out of the CSV
 * (data columns, embedded config, derived band frequencies).  Nothing here
 * evaluates physics.  Recipe ids (fig1b … fig5pump) are stable slot names
 * for the standard report figures; the `describe` strings say what each
 * one draws.
 */

import {
  SchemaError,
  SweepTable,
  configNumber,
  derivedValue,
  numericColumn,
  okRows,
  requireCommand,
  stringColumn,
} from "./csv.js";
import {
  DEFAULT_MARGIN,
  LinearScale,
  SERIES_COLORS,
  arrow,
  axisBottom,
  axisLeft,
  el,
  esc,
  fmt,
  padded,
  polyline,
  rampColor,
  svgDocument,
} from "./svg.js";

export interface RecipeOptions {
  width?: number;
  height?: number;
  /** keep every n-th group-velocity arrow on contour plots */
  arrowEvery?: number;
}

export interface Recipe {
  id: string;
  /** CLI command whose artifact(s) the recipe consumes */
  command: string;
  /** accepted number of input CSVs: [min, max] */
  inputs: [number, number];
  describe: string;
  render(tables: SweepTable[], opts?: RecipeOptions): string;
}

function headerComments(tables: SweepTable[]): string[] {
  const out: string[] = [];
  for (const t of tables) {
    out.push(`source: ${t.source} (${t.version})`);
    out.push(`config: ${t.configText}`);
  }
  return out;
}

function biasLabel(t: SweepTable): string {
  const wc = configNumber(t, "material", "omega_c");
  return wc === null ? t.source : `omega_c = ${wc}`;
}

function requireUsable(t: SweepTable): string[][] {
  const rows = okRows(t);
  if (rows.length === 0) {
    throw new SchemaError(`${t.source}: no usable data rows (all ok=0 or empty)`);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// generic xy line panel
// ---------------------------------------------------------------------------

interface Series {
  x: number[];
  y: number[];
  label: string;
  color: string;
}

interface XyPanelSpec {
  series: Series[];
  xLabel: string;
  yLabel: string;
  title: string;
  /** dashed vertical markers, e.g. band-edge frequencies from the header */
  markers?: { x: number; cls: string }[];
  zeroLine?: boolean;
  legend?: boolean;
  width: number;
  height: number;
}

function xyPanel(spec: XyPanelSpec): string {
  const m = DEFAULT_MARGIN;
  const xs = spec.series.flatMap((s) => s.x);
  const ys = spec.series.flatMap((s) => s.y);
  const markerXs = (spec.markers ?? []).map((mk) => mk.x);
  const [x0, x1] = padded(xs.concat(markerXs));
  let [y0, y1] = padded(ys);
  if (spec.zeroLine) {
    y0 = Math.min(y0, 0);
    y1 = Math.max(y1, 0);
  }
  const sx = new LinearScale(x0, x1, m.left, spec.width - m.right);
  const sy = new LinearScale(y0, y1, spec.height - m.bottom, m.top);

  const parts: string[] = [];
  parts.push(el("text", {
    x: spec.width / 2, y: 20, "text-anchor": "middle",
    "font-size": 14, fill: "#111",
  }, esc(spec.title)));

  if (spec.zeroLine) {
    parts.push(el("line", {
      x1: sx.r0, y1: sy.apply(0), x2: sx.r1, y2: sy.apply(0),
      stroke: "#999", "stroke-width": 0.8, "stroke-dasharray": "2 3",
    }));
  }
  for (const mk of spec.markers ?? []) {
    parts.push(el("line", {
      class: mk.cls,
      "data-omega": fmt(mk.x),
      x1: sx.apply(mk.x), y1: sy.r1, x2: sx.apply(mk.x), y2: sy.r0,
      stroke: "#555", "stroke-width": 1, "stroke-dasharray": "5 4",
    }));
  }
  spec.series.forEach((s) => {
    parts.push(polyline(
      s.x.map((v) => sx.apply(v)), s.y.map((v) => sy.apply(v)),
      { stroke: s.color, "stroke-width": 1.6, class: "series" },
    ));
  });
  if (spec.legend && spec.series.length > 1) {
    spec.series.forEach((s, i) => {
      const yy = m.top + 14 + 16 * i;
      parts.push(el("line", {
        x1: spec.width - m.right - 120, y1: yy - 4,
        x2: spec.width - m.right - 96, y2: yy - 4,
        stroke: s.color, "stroke-width": 2,
      }));
      parts.push(el("text", {
        x: spec.width - m.right - 90, y: yy, "font-size": 11, fill: "#333",
      }, esc(s.label)));
    });
  }
  parts.push(axisBottom(sx, spec.height - m.bottom, spec.xLabel));
  parts.push(axisLeft(sy, m.left, spec.yLabel));
  return parts.join("");
}

// ---------------------------------------------------------------------------
// polar panel (far-field patterns)
// ---------------------------------------------------------------------------

function polarPanel(
  tables: SweepTable[], title: string, width: number, height: number,
): string {
  const cx = width / 2;
  const cy = height / 2 + 10;
  const R = Math.min(width, height) / 2 - 52;
  const parts: string[] = [];
  parts.push(el("text", {
    x: width / 2, y: 20, "text-anchor": "middle", "font-size": 14, fill: "#111",
  }, esc(title)));

  for (const frac of [0.25, 0.5, 0.75, 1.0]) {
    parts.push(el("circle", {
      cx, cy, r: R * frac, fill: "none", stroke: "#ccc", "stroke-width": 0.8,
    }));
    parts.push(el("text", {
      x: cx + 4, y: cy - R * frac - 3, "font-size": 9, fill: "#888",
    }, fmt(frac)));
  }
  for (let deg = 0; deg < 360; deg += 45) {
    const a = (deg * Math.PI) / 180;
    parts.push(el("line", {
      x1: cx, y1: cy, x2: cx + R * Math.cos(a), y2: cy - R * Math.sin(a),
      stroke: "#e5e5e5", "stroke-width": 0.8,
    }));
    parts.push(el("text", {
      x: cx + (R + 14) * Math.cos(a), y: cy - (R + 14) * Math.sin(a) + 3,
      "text-anchor": "middle", "font-size": 10, fill: "#666",
    }, `${deg}`));
  }

  tables.forEach((t, i) => {
    const rows = requireUsable(t);
    const az = numericColumn(t, "azimuth_deg", rows);
    const inten = numericColumn(t, "intensity", rows);
    const pts = az.map((a, k) => {
      const rad = (a * Math.PI) / 180;
      const r = R * Math.min(Math.max(inten[k]!, 0), 1);
      return `${fmt(cx + r * Math.cos(rad))},${fmt(cy - r * Math.sin(rad))}`;
    });
    parts.push(el("polygon", {
      points: pts.join(" "),
      fill: "none",
      stroke: SERIES_COLORS[i % SERIES_COLORS.length]!,
      "stroke-width": 1.6,
      class: "pattern",
    }));
    if (tables.length > 1) {
      const yy = 36 + 16 * i;
      parts.push(el("line", {
        x1: width - 150, y1: yy - 4, x2: width - 126, y2: yy - 4,
        stroke: SERIES_COLORS[i % SERIES_COLORS.length]!, "stroke-width": 2,
      }));
      parts.push(el("text", {
        x: width - 120, y: yy, "font-size": 11, fill: "#333",
      }, esc(biasLabel(t))));
    }
  });
  return parts.join("");
}

// ---------------------------------------------------------------------------
// recipes
// ---------------------------------------------------------------------------

function renderFrequencySweep(
  tables: SweepTable[], opts: RecipeOptions, withMarkers: boolean,
): string {
  const width = opts.width ?? 640;
  const height = opts.height ?? 420;
  const series: Series[] = tables.map((t, i) => {
    const rows = requireUsable(t);
    return {
      x: numericColumn(t, "omega0", rows),
      y: numericColumn(t, "F_tilde_x", rows),
      label: biasLabel(t),
      color: SERIES_COLORS[i % SERIES_COLORS.length]!,
    };
  });
  const markers = withMarkers
    ? [
        { x: derivedValue(tables[0]!, "omega_minus"), cls: "band-marker" },
        { x: derivedValue(tables[0]!, "omega_plus"), cls: "band-marker" },
      ]
    : undefined;
  const body = xyPanel({
    series,
    xLabel: "transition frequency (omega_p units)",
    yLabel: "lateral force (F0 units)",
    title: "Lateral recoil force vs transition frequency",
    markers,
    zeroLine: true,
    legend: tables.length > 1,
    width,
    height,
  });
  return svgDocument(width, height, body, headerComments(tables));
}

const fig1b: Recipe = {
  id: "fig1b",
  command: "sweep-frequency",
  inputs: [1, 1],
  describe: "force vs frequency line plot with dashed band-edge markers from the header",
  render: (tables, opts = {}) => renderFrequencySweep(tables, opts, true),
};

const fig2b: Recipe = {
  id: "fig2b",
  command: "sweep-frequency",
  inputs: [1, 4],
  describe: "overlay of force-vs-frequency sweeps (one line per CSV, labeled by bias)",
  render: (tables, opts = {}) => renderFrequencySweep(tables, opts, false),
};

const fig1c: Recipe = {
  id: "fig1c",
  command: "map",
  inputs: [1, 1],
  describe: "|force| heatmap over the (frequency, bias) plane",
  render: (tables, opts = {}) => {
    const t = tables[0]!;
    const width = opts.width ?? 640;
    const height = opts.height ?? 480;
    const all = t.rows;
    if (all.length === 0) throw new SchemaError(`${t.source}: no data rows`);
    const w0 = numericColumn(t, "omega0", all);
    const wc = numericColumn(t, "omega_c", all);
    const okCol = t.columns.indexOf("ok");
    const magCol = t.columns.indexOf("abs_F_tilde_x");
    const xs = [...new Set(w0)].sort((a, b) => a - b);
    const ys = [...new Set(wc)].sort((a, b) => a - b);
    const usable = requireUsable(t);
    const magMax = Math.max(...numericColumn(t, "abs_F_tilde_x", usable), 1e-300);

    const m = DEFAULT_MARGIN;
    const plotW = width - m.left - m.right - 70;
    const plotH = height - m.top - m.bottom;
    const cw = plotW / xs.length;
    const ch = plotH / ys.length;
    const parts: string[] = [];
    parts.push(el("text", {
      x: width / 2, y: 20, "text-anchor": "middle", "font-size": 14, fill: "#111",
    }, "|lateral force| over frequency and bias"));

    for (const row of all) {
      const xi = xs.indexOf(Number(row[t.columns.indexOf("omega0")]));
      const yi = ys.indexOf(Number(row[t.columns.indexOf("omega_c")]));
      const x = m.left + xi * cw;
      const y = m.top + plotH - (yi + 1) * ch;
      if (row[okCol] !== "1") {
        parts.push(el("rect", {
          x, y, width: cw, height: ch, fill: "#d9d9d9", class: "cell-failed",
        }));
        continue;
      }
      const mag = Number(row[magCol]);
      parts.push(el("rect", {
        x, y, width: cw, height: ch,
        fill: rampColor(mag / magMax), class: "cell",
        "data-value": fmt(mag),
      }));
    }

    // index-based tick labels
    const maxLabels = 8;
    const xStep = Math.max(1, Math.ceil(xs.length / maxLabels));
    xs.forEach((v, i) => {
      if (i % xStep !== 0) return;
      parts.push(el("text", {
        x: m.left + (i + 0.5) * cw, y: m.top + plotH + 16,
        "text-anchor": "middle", "font-size": 10, fill: "#333",
      }, String(Number(v.toPrecision(4)))));
    });
    const yStep = Math.max(1, Math.ceil(ys.length / maxLabels));
    ys.forEach((v, i) => {
      if (i % yStep !== 0) return;
      parts.push(el("text", {
        x: m.left - 6, y: m.top + plotH - (i + 0.5) * ch + 4,
        "text-anchor": "end", "font-size": 10, fill: "#333",
      }, String(Number(v.toPrecision(4)))));
    });
    parts.push(el("text", {
      x: m.left + plotW / 2, y: height - 12, "text-anchor": "middle",
      "font-size": 12, fill: "#111",
    }, "transition frequency (omega_p units)"));
    parts.push(el("text", {
      x: 16, y: m.top + plotH / 2, "text-anchor": "middle", "font-size": 12,
      fill: "#111", transform: `rotate(-90 16 ${fmt(m.top + plotH / 2)})`,
    }, "cyclotron bias (omega_p units)"));

    // color bar
    const barX = width - m.right - 50;
    const steps = 24;
    for (let i = 0; i < steps; i++) {
      parts.push(el("rect", {
        x: barX, y: m.top + plotH - ((i + 1) * plotH) / steps,
        width: 14, height: plotH / steps + 0.5, fill: rampColor((i + 0.5) / steps),
      }));
    }
    parts.push(el("text", {
      x: barX + 18, y: m.top + 10, "font-size": 10, fill: "#333",
    }, String(Number(magMax.toPrecision(3)))));
    parts.push(el("text", {
      x: barX + 18, y: m.top + plotH, "font-size": 10, fill: "#333",
    }, "0"));
    return svgDocument(width, height, parts.join(""), headerComments(tables));
  },
};

const fig1d: Recipe = {
  id: "fig1d",
  command: "sweep-bias",
  inputs: [1, 1],
  describe: "force vs cyclotron bias at fixed transition frequency",
  render: (tables, opts = {}) => {
    const t = tables[0]!;
    const width = opts.width ?? 640;
    const height = opts.height ?? 420;
    const rows = requireUsable(t);
    const body = xyPanel({
      series: [{
        x: numericColumn(t, "omega_c", rows),
        y: numericColumn(t, "F_tilde_x", rows),
        label: t.source,
        color: SERIES_COLORS[0]!,
      }],
      xLabel: "cyclotron bias (omega_p units)",
      yLabel: "lateral force (F0 units)",
      title: "Lateral recoil force vs bias",
      zeroLine: true,
      width,
      height,
    });
    return svgDocument(width, height, body, headerComments(tables));
  },
};

const fig2a: Recipe = {
  id: "fig2a",
  command: "angle",
  inputs: [1, 1],
  describe: "surface-wave launch angle across the band, with band-edge markers",
  render: (tables, opts = {}) => {
    const t = tables[0]!;
    const width = opts.width ?? 640;
    const height = opts.height ?? 420;
    const rows = requireUsable(t);
    const body = xyPanel({
      series: [{
        x: numericColumn(t, "omega0", rows),
        y: numericColumn(t, "theta0_deg", rows),
        label: t.source,
        color: SERIES_COLORS[0]!,
      }],
      xLabel: "transition frequency (omega_p units)",
      yLabel: "launch angle (degrees)",
      title: "Resonant launch angle vs transition frequency",
      markers: [
        { x: derivedValue(t, "omega_minus"), cls: "band-marker" },
        { x: derivedValue(t, "omega_plus"), cls: "band-marker" },
      ],
      width,
      height,
    });
    return svgDocument(width, height, body, headerComments(tables));
  },
};

const fig3abc: Recipe = {
  id: "fig3abc",
  command: "efc",
  inputs: [1, 3],
  describe: "equifrequency contours with decimated group-velocity arrows, one panel per CSV",
  render: (tables, opts = {}) => {
    const panelW = opts.width ?? 300;
    const height = opts.height ?? 340;
    const every = Math.max(1, Math.floor(opts.arrowEvery ?? 8));
    const width = panelW * tables.length;

    let kMax = 0;
    const data = tables.map((t) => {
      const rows = requireUsable(t);
      const kx = numericColumn(t, "kx_over_k0", rows);
      const ky = numericColumn(t, "ky_over_k0", rows);
      const vgx = numericColumn(t, "vgx", rows);
      const vgy = numericColumn(t, "vgy", rows);
      const topology = stringColumn(t, "topology", rows)[0] ?? "";
      kx.forEach((v, i) => { kMax = Math.max(kMax, Math.hypot(v, ky[i]!)); });
      return { t, kx, ky, vgx, vgy, topology };
    });
    const lim = kMax * 1.12;

    const parts: string[] = [];
    data.forEach((d, p) => {
      const ox = p * panelW;
      const cx = ox + panelW / 2;
      const cy = height / 2 + 14;
      const R = panelW / 2 - 34;
      const scale = (v: number) => (v / lim) * R;
      parts.push(el("text", {
        x: cx, y: 20, "text-anchor": "middle", "font-size": 12, fill: "#111",
      }, esc(`${biasLabel(d.t)} (${d.topology})`)));
      parts.push(el("line", {
        x1: ox + 16, y1: cy, x2: ox + panelW - 16, y2: cy,
        stroke: "#ccc", "stroke-width": 0.8,
      }));
      parts.push(el("line", {
        x1: cx, y1: cy - R - 6, x2: cx, y2: cy + R + 6,
        stroke: "#ccc", "stroke-width": 0.8,
      }));
      parts.push(el("text", {
        x: ox + panelW - 16, y: cy - 5, "text-anchor": "end",
        "font-size": 10, fill: "#666",
      }, "kx/k0"));
      parts.push(el("text", {
        x: cx + 5, y: cy - R - 8, "font-size": 10, fill: "#666",
      }, "ky/k0"));
      parts.push(el("text", {
        x: cx, y: height - 8, "text-anchor": "middle", "font-size": 10, fill: "#888",
      }, esc(`|k| range 0..${Number(lim.toPrecision(3))} k0`)));

      d.kx.forEach((v, i) => {
        const x = cx + scale(v);
        const y = cy - scale(d.ky[i]!);
        parts.push(el("circle", {
          cx: x, cy: y, r: 1.7, fill: "#1f77b4", class: "efc-point",
        }));
        if (i % every === 0) {
          parts.push(arrow(x, y, d.vgx[i]!, -d.vgy[i]!, 13, {
            class: "vg-arrow", stroke: "#d62728",
          }));
        }
      });
    });
    return svgDocument(width, height, parts.join(""), headerComments(tables));
  },
};

const fig3d: Recipe = {
  id: "fig3d",
  command: "farfield",
  inputs: [1, 1],
  describe: "polar plot of the azimuthal surface-wave power pattern",
  render: (tables, opts = {}) => {
    const width = opts.width ?? 460;
    const height = opts.height ?? 460;
    const body = polarPanel(tables, "Launched surface-wave power pattern", width, height);
    return svgDocument(width, height, body, headerComments(tables));
  },
};

const fig4efs: Recipe = {
  id: "fig4efs",
  command: "farfield",
  inputs: [1, 4],
  describe: "overlay of far-field patterns at several biases in one polar frame",
  render: (tables, opts = {}) => {
    const width = opts.width ?? 520;
    const height = opts.height ?? 480;
    const body = polarPanel(tables, "Far-field patterns vs bias", width, height);
    return svgDocument(width, height, body, headerComments(tables));
  },
};

const fig5pump: Recipe = {
  id: "fig5pump",
  command: "pump",
  inputs: [1, 1],
  describe: "stacked population and force traces under resonant pumping",
  render: (tables, opts = {}) => {
    const t = tables[0]!;
    const width = opts.width ?? 640;
    const height = opts.height ?? 600;
    const rows = requireUsable(t);
    const tt = numericColumn(t, "t_tilde", rows);
    const half = height / 2;
    const top = xyPanel({
      series: [{
        x: tt, y: numericColumn(t, "rho_ee", rows),
        label: t.source, color: SERIES_COLORS[2]!,
      }],
      xLabel: "",
      yLabel: "excited population",
      title: "Pumped emitter: population and force",
      zeroLine: true,
      width,
      height: half,
    });
    const bottom = xyPanel({
      series: [{
        x: tt, y: numericColumn(t, "F_tilde_x", rows),
        label: t.source, color: SERIES_COLORS[0]!,
      }],
      xLabel: "time (units of inverse decay rate)",
      yLabel: "lateral force (F0 units)",
      title: "",
      zeroLine: true,
      width,
      height: half,
    });
    const body = top + el("g", { transform: `translate(0 ${fmt(half)})` }, bottom);
    return svgDocument(width, height, body, headerComments(tables));
  },
};

export const RECIPES: Record<string, Recipe> = Object.fromEntries(
  [fig1b, fig1c, fig1d, fig2a, fig2b, fig3abc, fig3d, fig4efs, fig5pump]
    .map((r) => [r.id, r]),
);

/** Validate inputs against the recipe's schema and render to SVG text. */
export function render(
  id: string, tables: SweepTable[], opts: RecipeOptions = {},
): string {
  const recipe = RECIPES[id];
  if (!recipe) {
    throw new SchemaError(
      `unknown recipe '${id}' (have: ${Object.keys(RECIPES).sort().join(", ")})`,
    );
  }
  const [lo, hi] = recipe.inputs;
  if (tables.length < lo || tables.length > hi) {
    throw new SchemaError(
      `recipe ${id} takes ${lo === hi ? lo : `${lo}..${hi}`} CSV file(s), got ${tables.length}`,
    );
  }
  for (const t of tables) {
    requireCommand(t, recipe.command);
  }
  return recipe.render(tables, opts);
}
