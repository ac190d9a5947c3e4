/**
 * Command-line renderer: reads one or more solver CSV artifacts and writes
 * a single SVG figure.
 *
 *   spprecoil-figures <recipe> <csv...> [--out file.svg] [--arrow-every n]
 *                     [--width px] [--height px]
 *
 * Exit codes: 0 rendered, 1 schema/data mismatch, 2 usage or I/O error.
 */

import { parseArgs } from "node:util";
import { writeFileSync } from "node:fs";
import { resolve } from "node:path";
import { pathToFileURL } from "node:url";

import { SchemaError, readTable } from "./csv.js";
import { RECIPES, RecipeOptions, render } from "./recipes.js";

export class UsageError extends Error {}

function usageText(): string {
  const lines = Object.values(RECIPES)
    .sort((a, b) => a.id.localeCompare(b.id))
    .map((r) => {
      const n = r.inputs[0] === r.inputs[1]
        ? `${r.inputs[0]}`
        : `${r.inputs[0]}..${r.inputs[1]}`;
      return `  ${r.id.padEnd(9)} ${n} x ${r.command.padEnd(15)} ${r.describe}`;
    });
  return [
    "usage: spprecoil-figures <recipe> <csv...> [options]",
    "",
    "options:",
    "  --out <file>         output SVG path (default: <recipe>.svg)",
    "  --arrow-every <n>    keep every n-th group-velocity arrow (efc panels)",
    "  --width <px>         panel width override",
    "  --height <px>        panel height override",
    "",
    "recipes (count x source command):",
    ...lines,
  ].join("\n");
}

interface ParsedCli {
  recipe: string;
  csvPaths: string[];
  out: string;
  opts: RecipeOptions;
}

function positiveInt(raw: string | undefined, flag: string): number | undefined {
  if (raw === undefined) return undefined;
  const v = Number(raw);
  if (!Number.isInteger(v) || v <= 0) {
    throw new UsageError(`${flag} must be a positive integer, got '${raw}'`);
  }
  return v;
}

export function parseCli(argv: string[]): ParsedCli {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        out: { type: "string" },
        "arrow-every": { type: "string" },
        width: { type: "string" },
        height: { type: "string" },
        help: { type: "boolean", short: "h" },
      },
    });
  } catch (err) {
    throw new UsageError((err as Error).message);
  }
  if (parsed.values.help) {
    throw new UsageError(usageText());
  }
  const [recipe, ...csvPaths] = parsed.positionals;
  if (!recipe) {
    throw new UsageError(usageText());
  }
  if (!(recipe in RECIPES)) {
    throw new UsageError(
      `unknown recipe '${recipe}' (have: ${Object.keys(RECIPES).sort().join(", ")})`,
    );
  }
  if (csvPaths.length === 0) {
    throw new UsageError(`recipe ${recipe} needs at least one CSV file`);
  }
  return {
    recipe,
    csvPaths,
    out: parsed.values.out ?? `${recipe}.svg`,
    opts: {
      arrowEvery: positiveInt(parsed.values["arrow-every"], "--arrow-every"),
      width: positiveInt(parsed.values.width, "--width"),
      height: positiveInt(parsed.values.height, "--height"),
    },
  };
}

/** Run the CLI against argv (without node/script prefix); returns exit code. */
export function runCli(
  argv: string[],
  stderr: (line: string) => void = (line) => process.stderr.write(line + "\n"),
): number {
  let cli: ParsedCli;
  try {
    cli = parseCli(argv);
  } catch (err) {
    stderr(err instanceof UsageError ? err.message : String(err));
    return 2;
  }
  try {
    const tables = cli.csvPaths.map((p) => readTable(resolve(p)));
    const svg = render(cli.recipe, tables, cli.opts);
    writeFileSync(cli.out, svg, "utf8");
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      stderr(`schema mismatch: ${err.message}`);
      return 1;
    }
    if (err instanceof Error && "code" in err) {
      stderr(`cannot read input: ${err.message}`);
      return 2;
    }
    throw err;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === pathToFileURL(resolve(process.argv[1])).href;

if (invokedDirectly) {
  process.exit(runCli(process.argv.slice(2)));
}
