import { spawnSync } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, describe, expect, it } from "vitest";

import { FIXTURES } from "./global-setup.js";

const CLI = fileURLToPath(new URL("../dist/cli.js", import.meta.url));
const work = mkdtempSync(join(tmpdir(), "spprecoil-figures-"));

afterAll(() => rmSync(work, { recursive: true, force: true }));

function cli(args: string[]): { status: number | null; stderr: string } {
  const res = spawnSync(process.execPath, [CLI, ...args], {
    cwd: work,
    encoding: "utf8",
  });
  return { status: res.status, stderr: res.stderr };
}

describe("figure CLI", () => {
  it("is built before the suite runs", () => {
    expect(existsSync(CLI)).toBe(true);
  });

  it("renders a sweep to the requested SVG path", () => {
    const out = join(work, "band.svg");
    const res = cli(["fig1b", join(FIXTURES, "sweep_wb1.csv"), "--out", out]);
    expect(res.stderr).toBe("");
    expect(res.status).toBe(0);
    const svg = readFileSync(out, "utf8");
    expect(svg.startsWith("<svg ")).toBe(true);
    expect(svg).toContain("band-marker");
    expect(svg).toContain("config: ");
  });

  it("defaults the output name to <recipe>.svg in the working directory", () => {
    const res = cli(["fig2a", join(FIXTURES, "angle.csv")]);
    expect(res.status).toBe(0);
    expect(existsSync(join(work, "fig2a.svg"))).toBe(true);
  });

  it("exits 1 with a message on schema mismatch and writes no image", () => {
    const out = join(work, "mismatch.svg");
    const res = cli(["fig1b", join(FIXTURES, "angle.csv"), "--out", out]);
    expect(res.status).toBe(1);
    expect(res.stderr).toMatch(/schema mismatch/);
    expect(res.stderr).toMatch(/expected sweep-frequency columns/);
    expect(existsSync(out)).toBe(false);
  });

  it("exits 1 on an empty CSV and writes no image", () => {
    const out = join(work, "empty.svg");
    const res = cli(["fig1b", join(FIXTURES, "empty.csv"), "--out", out]);
    expect(res.status).toBe(1);
    expect(res.stderr).toMatch(/empty artifact/);
    expect(existsSync(out)).toBe(false);
  });

  it("exits 1 when a recipe is given too many inputs", () => {
    const one = join(FIXTURES, "sweep_wb1.csv");
    const res = cli(["fig1b", one, join(FIXTURES, "sweep_wb2.csv")]);
    expect(res.status).toBe(1);
    expect(res.stderr).toMatch(/takes 1 CSV/);
  });

  it("exits 2 on usage errors", () => {
    expect(cli([]).status).toBe(2);
    expect(cli(["fig9", "x.csv"]).status).toBe(2);
    expect(cli(["fig9", "x.csv"]).stderr).toMatch(/unknown recipe/);
    expect(cli(["fig1b"]).status).toBe(2);
    const bad = cli([
      "fig3abc", join(FIXTURES, "efc_closed.csv"), "--arrow-every", "0",
    ]);
    expect(bad.status).toBe(2);
    expect(bad.stderr).toMatch(/--arrow-every/);
  });

  it("exits 2 on a missing input file", () => {
    const res = cli(["fig1b", join(FIXTURES, "no-such.csv")]);
    expect(res.status).toBe(2);
    expect(res.stderr).toMatch(/no-such\.csv/);
  });

  it("honors --arrow-every on contour panels", () => {
    const out = join(work, "efc.svg");
    const res = cli([
      "fig3abc", join(FIXTURES, "efc_closed.csv"),
      "--arrow-every", "1000", "--out", out,
    ]);
    expect(res.status).toBe(0);
    const svg = readFileSync(out, "utf8");
    expect(svg.match(/class="vg-arrow"/g)).toHaveLength(1);
  });

  it("renders byte-identical output across runs", () => {
    const a = join(work, "a.svg");
    const b = join(work, "b.svg");
    const src = join(FIXTURES, "pump.csv");
    expect(cli(["fig5pump", src, "--out", a]).status).toBe(0);
    expect(cli(["fig5pump", src, "--out", b]).status).toBe(0);
    expect(readFileSync(a, "utf8")).toBe(readFileSync(b, "utf8"));
  });
});
