import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { SchemaError, okRows, parseTable, readTable } from "../src/csv.js";
import { RECIPES, render } from "../src/recipes.js";
import { FIXTURES } from "./global-setup.js";

const fix = (name: string) => readTable(join(FIXTURES, name));

/** fixture(s) satisfying each recipe's input contract */
const RECIPE_INPUTS: Record<string, string[]> = {
  fig1b: ["sweep_wb1.csv"],
  fig1c: ["map_3x3.csv"],
  fig1d: ["bias_sweep.csv"],
  fig2a: ["angle.csv"],
  fig2b: ["sweep_wb1.csv", "sweep_wb2.csv"],
  fig3abc: ["efc_hyperbolic.csv", "efc_closed.csv"],
  fig3d: ["farfield_biased.csv"],
  fig4efs: ["farfield_biased.csv", "farfield_flat.csv"],
  fig5pump: ["pump.csv"],
};

describe("every recipe renders its CLI artifact", () => {
  it("the fixture map covers the recipe registry exactly", () => {
    expect(Object.keys(RECIPE_INPUTS).sort())
      .toEqual(Object.keys(RECIPES).sort());
  });

  for (const [id, files] of Object.entries(RECIPE_INPUTS)) {
    it(`${id} renders ${files.join(" + ")}`, () => {
      const svg = render(id, files.map(fix));
      expect(svg.startsWith("<svg ")).toBe(true);
      expect(svg.trimEnd().endsWith("</svg>")).toBe(true);
      // each input's resolved config header must ride along in the figure
      for (const f of files) {
        const table = fix(f);
        expect(svg).toContain(`config: ${table.configText.replace(/--/g, "- -")}`);
      }
      expect(svg).not.toMatch(/NaN|Infinity/);
    });
  }
});

describe("fig1b band markers", () => {
  it("places two dashed vertical markers at the header's band edges", () => {
    const table = fix("sweep_wb1.csv");
    const svg = render("fig1b", [table]);
    const markers = [...svg.matchAll(
      /<line class="band-marker" data-omega="([^"]+)"[^/]*stroke-dasharray/g,
    )];
    expect(markers).toHaveLength(2);
    const at = markers.map((m) => Number(m[1])).sort((a, b) => a - b);
    expect(at[0]).toBeCloseTo(table.derived.omega_minus!, 5);
    expect(at[1]).toBeCloseTo(table.derived.omega_plus!, 5);
  });

  it("fig2b overlays skip the markers and label each sweep by its bias", () => {
    const svg = render("fig2b", [fix("sweep_wb1.csv"), fix("sweep_wb2.csv")]);
    expect(svg).not.toContain("band-marker");
    expect(svg).toContain("omega_c = 0.01");
    expect(svg).toContain("omega_c = 0.02");
  });
});

describe("partial artifacts", () => {
  it("fig1b draws only the usable rows of a partial sweep", () => {
    const table = fix("sweep_partial.csv");
    const usable = okRows(table).length;
    expect(usable).toBeGreaterThan(0);
    expect(usable).toBeLessThan(table.rows.length);
    const svg = render("fig1b", [table]);
    const pts = svg.match(/<polyline points="([^"]+)"[^/]*class="series"/);
    expect(pts).not.toBeNull();
    expect(pts![1]!.split(" ")).toHaveLength(usable);
  });

  it("fig1c paints failed map cells in the neutral style", () => {
    const text = [
      "# spprecoil 0.1.0",
      '# config: {"command":"map"}',
      '# derived: {"omega_minus":0.6,"omega_plus":0.8,"omega_spp":0.707}',
      "omega0,omega_c,abs_F_tilde_x,ok,error",
      "0.6,0.2,0.5,1,",
      "0.7,0.2,,0,NumericalError: diverged",
      "0.6,0.3,0.25,1,",
      "0.7,0.3,1.0,1,",
      "",
    ].join("\n");
    const svg = render("fig1c", [parseTable(text, "inline-map.csv")]);
    expect(svg.match(/class="cell-failed"/g)).toHaveLength(1);
    expect(svg.match(/class="cell"/g)).toHaveLength(3);
  });
});

describe("equifrequency panels", () => {
  it("decimates group-velocity arrows at the requested stride", () => {
    const table = fix("efc_closed.csv");
    const n = okRows(table).length;
    for (const every of [1, 5, 1000]) {
      const svg = render("fig3abc", [table], { arrowEvery: every });
      const arrows = svg.match(/class="vg-arrow"/g) ?? [];
      expect(arrows).toHaveLength(Math.ceil(n / every));
    }
  });

  it("labels each panel with the artifact's topology string", () => {
    const svg = render("fig3abc", [fix("efc_hyperbolic.csv"), fix("efc_closed.csv")]);
    expect(svg).toContain("(open-hyperbolic)");
    expect(svg).toContain("(closed)");
  });
});

describe("input validation", () => {
  it("rejects an artifact from a different command", () => {
    expect(() => render("fig1b", [fix("angle.csv")]))
      .toThrow(/expected sweep-frequency columns/);
  });

  it("rejects a wrong number of inputs", () => {
    expect(() => render("fig1b", [fix("sweep_wb1.csv"), fix("sweep_wb2.csv")]))
      .toThrow(/takes 1 CSV/);
    expect(() => render("fig3abc", [])).toThrow(SchemaError);
  });

  it("rejects unknown recipe ids with the available list", () => {
    expect(() => render("fig9", [fix("sweep_wb1.csv")]))
      .toThrow(/unknown recipe 'fig9'.*fig1b/);
  });

  it("rejects an empty CSV before rendering", () => {
    expect(() => fix("empty.csv")).toThrow(/empty artifact/);
  });
});

describe("determinism", () => {
  it("renders byte-identical SVG for identical inputs", () => {
    for (const [id, files] of Object.entries(RECIPE_INPUTS)) {
      const a = render(id, files.map(fix));
      const b = render(id, files.map(fix));
      expect(a === b, `${id} must be deterministic`).toBe(true);
    }
  });
});
