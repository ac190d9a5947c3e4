import { describe, expect, it } from "vitest";

import {
  SchemaError,
  derivedValue,
  numericColumn,
  okRows,
  parseTable,
  requireCommand,
  stringColumn,
} from "../src/csv.js";

const SAMPLE = `# spprecoil 0.1.0
# config: {"command":"sweep-frequency","material":{"omega_c":0.25,"gamma_damp":0.015}}
# derived: {"omega_minus":0.588,"omega_plus":0.838,"omega_spp":0.7071067811865476}
omega0,F_tilde_x,F_tilde_y,err,ok,error
0.6,1.25,0.001,1e-08,1,
0.65,,,,0,"NumericalError: no pole, gave up"
0.7,-2.5,0.002,2e-08,1,
`;

describe("parseTable", () => {
  it("captures version, config, derived block, columns, and rows", () => {
    const t = parseTable(SAMPLE, "sample.csv");
    expect(t.version).toBe("spprecoil 0.1.0");
    expect(t.configText).toContain('"command":"sweep-frequency"');
    expect((t.config as { command?: string }).command).toBe("sweep-frequency");
    expect(t.derived.omega_spp).toBeCloseTo(Math.SQRT1_2, 12);
    expect(t.columns).toEqual(
      ["omega0", "F_tilde_x", "F_tilde_y", "err", "ok", "error"],
    );
    expect(t.rows).toHaveLength(3);
  });

  it("honors quoted cells containing commas", () => {
    const t = parseTable(SAMPLE, "sample.csv");
    const failed = t.rows[1]!;
    expect(failed).toHaveLength(6);
    expect(failed[5]).toBe("NumericalError: no pole, gave up");
  });

  it("rejects empty artifacts", () => {
    expect(() => parseTable("", "void.csv")).toThrow(SchemaError);
    expect(() => parseTable("\n\n", "void.csv")).toThrow(/empty artifact/);
  });

  it("rejects malformed header JSON", () => {
    const bad = "# tool 1\n# config: {broken\na,ok\n1,1\n";
    expect(() => parseTable(bad, "bad.csv")).toThrow(/malformed config JSON/);
  });
});

describe("column access", () => {
  const t = parseTable(SAMPLE, "sample.csv");

  it("okRows keeps only rows the CLI marked usable", () => {
    const rows = okRows(t);
    expect(rows).toHaveLength(2);
    expect(rows.map((r) => r[0])).toEqual(["0.6", "0.7"]);
  });

  it("numericColumn defaults to usable rows and parses floats", () => {
    expect(numericColumn(t, "F_tilde_x")).toEqual([1.25, -2.5]);
  });

  it("numericColumn rejects blank cells when fed failed rows", () => {
    expect(() => numericColumn(t, "F_tilde_x", t.rows))
      .toThrow(/non-numeric 'F_tilde_x'/);
  });

  it("stringColumn and missing-column errors name the column", () => {
    expect(stringColumn(t, "error", t.rows)[1]).toMatch(/no pole/);
    expect(() => numericColumn(t, "bogus")).toThrow(/no 'bogus' column/);
  });

  it("derivedValue returns header frequencies and names missing keys", () => {
    expect(derivedValue(t, "omega_minus")).toBeCloseTo(0.588, 12);
    expect(() => derivedValue(t, "omega_zero")).toThrow(/derived 'omega_zero'/);
  });
});

describe("requireCommand", () => {
  it("accepts the documented layout and rejects other artifacts", () => {
    const t = parseTable(SAMPLE, "sample.csv");
    expect(() => requireCommand(t, "sweep-frequency")).not.toThrow();
    expect(() => requireCommand(t, "angle"))
      .toThrow(/expected angle columns.*written by 'sweep-frequency'/s);
    expect(() => requireCommand(t, "no-such-kind")).toThrow(SchemaError);
  });
});
