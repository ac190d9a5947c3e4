/**
 * Reader for the CSV artifacts written by the `spprecoil` CLI.
 *
 * Every artifact starts with three comment lines — tool version, the fully
 * resolved run configuration as JSON, and derived band frequencies as JSON —
 * followed by a header row and data rows.  Rendering is read-only over these
 * files: all numbers come from the CSV, never from re-derived physics.
 */

import { readFileSync } from "node:fs";

export class SchemaError extends Error {
  override name = "SchemaError";
}

/** Documented column layout of each CLI command's artifact. */
export const COMMAND_COLUMNS: Record<string, readonly string[]> = {
  "sweep-frequency": ["omega0", "F_tilde_x", "F_tilde_y", "err", "ok", "error"],
  "sweep-bias": ["omega_c", "F_tilde_x", "F_tilde_y", "err", "ok", "error"],
  map: ["omega0", "omega_c", "abs_F_tilde_x", "ok", "error"],
  angle: ["omega0", "theta0_deg", "ok", "error"],
  efc: ["theta", "kx_over_k0", "ky_over_k0", "vgx", "vgy", "topology", "ok", "error"],
  farfield: ["azimuth_deg", "intensity", "ok", "error"],
  pump: ["t_tilde", "rho_ee", "F_tilde_x", "ok", "error"],
  "force-point": [
    "omega0", "F_tilde_x", "F_tilde_y", "err", "F0_pN", "F_x_pN",
    "delta_vs_quasistatic", "ok", "error",
  ],
};

export interface SweepTable {
  /** path the table was read from ("<string>" when parsed from memory) */
  source: string;
  /** first header comment, e.g. "spprecoil 0.1.0" */
  version: string;
  /** resolved run configuration embedded by the CLI (raw JSON text kept too) */
  config: Record<string, unknown>;
  configText: string;
  /** derived band frequencies embedded by the CLI */
  derived: Record<string, number>;
  columns: string[];
  /** raw cells, one string[] per data row */
  rows: string[][];
}

/** Split one CSV line, honoring double-quoted cells with "" escapes. */
function splitCsvLine(line: string): string[] {
  if (!line.includes('"')) return line.split(",");
  const cells: string[] = [];
  let cur = "";
  let quoted = false;
  for (let i = 0; i < line.length; i++) {
    const ch = line[i]!;
    if (quoted) {
      if (ch === '"') {
        if (line[i + 1] === '"') {
          cur += '"';
          i++;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch === '"') {
      quoted = true;
    } else if (ch === ",") {
      cells.push(cur);
      cur = "";
    } else {
      cur += ch;
    }
  }
  cells.push(cur);
  return cells;
}

function parseJsonComment(line: string, what: string, source: string): unknown {
  try {
    return JSON.parse(line);
  } catch {
    throw new SchemaError(`${source}: malformed ${what} JSON in header`);
  }
}

/** Parse CSV text in the CLI's artifact layout. */
export function parseTable(text: string, source = "<string>"): SweepTable {
  const lines = text.split(/\r?\n/);
  let version = "";
  let configText = "";
  let config: Record<string, unknown> = {};
  let derived: Record<string, number> = {};
  let columns: string[] | null = null;
  const rows: string[][] = [];

  for (const line of lines) {
    if (line.trim() === "") continue;
    if (line.startsWith("#")) {
      const body = line.replace(/^#\s?/, "");
      if (body.startsWith("config: ")) {
        configText = body.slice("config: ".length);
        config = parseJsonComment(configText, "config", source) as Record<string, unknown>;
      } else if (body.startsWith("derived: ")) {
        derived = parseJsonComment(
          body.slice("derived: ".length), "derived", source,
        ) as Record<string, number>;
      } else if (version === "") {
        version = body;
      }
      continue;
    }
    if (columns === null) {
      columns = splitCsvLine(line).map((c) => c.trim());
    } else {
      rows.push(splitCsvLine(line));
    }
  }

  if (columns === null) {
    throw new SchemaError(`${source}: empty artifact (no header row)`);
  }
  return { source, version, config, configText, derived, columns, rows };
}

export function readTable(path: string): SweepTable {
  return parseTable(readFileSync(path, "utf8"), path);
}

/** Assert the table carries the documented columns of `command`. */
export function requireCommand(table: SweepTable, command: string): void {
  const expected = COMMAND_COLUMNS[command];
  if (!expected) throw new SchemaError(`unknown artifact kind '${command}'`);
  const got = table.columns;
  const same =
    got.length === expected.length && expected.every((c, i) => got[i] === c);
  if (!same) {
    const embedded = (table.config as { command?: string }).command;
    const hint = embedded && embedded !== command
      ? ` (file was written by '${embedded}')`
      : "";
    throw new SchemaError(
      `${table.source}: expected ${command} columns [${expected.join(", ")}], ` +
      `found [${got.join(", ")}]${hint}`,
    );
  }
}

/** Rows the CLI marked usable (ok = 1). */
export function okRows(table: SweepTable): string[][] {
  const k = table.columns.indexOf("ok");
  if (k < 0) throw new SchemaError(`${table.source}: no 'ok' column`);
  return table.rows.filter((r) => r[k] === "1");
}

/** Numeric column over the given rows (defaults to the usable rows). */
export function numericColumn(
  table: SweepTable, name: string, rows?: string[][],
): number[] {
  const k = table.columns.indexOf(name);
  if (k < 0) throw new SchemaError(`${table.source}: no '${name}' column`);
  const src = rows ?? okRows(table);
  return src.map((r, i) => {
    const raw = (r[k] ?? "").trim();
    // Number("") is 0, which would turn a failed row's blank cell into data
    const v = raw === "" ? NaN : Number(raw);
    if (!Number.isFinite(v)) {
      throw new SchemaError(
        `${table.source}: row ${i + 1}: non-numeric '${name}' value '${r[k]}'`,
      );
    }
    return v;
  });
}

/** String column over the given rows (defaults to the usable rows). */
export function stringColumn(
  table: SweepTable, name: string, rows?: string[][],
): string[] {
  const k = table.columns.indexOf(name);
  if (k < 0) throw new SchemaError(`${table.source}: no '${name}' column`);
  return (rows ?? okRows(table)).map((r) => r[k] ?? "");
}

/** Derived band frequency from the header, or a schema error naming it. */
export function derivedValue(table: SweepTable, key: string): number {
  const v = table.derived[key];
  if (typeof v !== "number" || !Number.isFinite(v)) {
    throw new SchemaError(`${table.source}: header lacks derived '${key}'`);
  }
  return v;
}

/** material.<key> from the embedded config (labels, never physics). */
export function configNumber(table: SweepTable, block: string, key: string): number | null {
  const b = table.config[block];
  if (b && typeof b === "object") {
    const v = (b as Record<string, unknown>)[key];
    if (typeof v === "number" && Number.isFinite(v)) return v;
  }
  return null;
}
