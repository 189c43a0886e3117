/** plots CLI:
 *    render   --figure fig2 --in DIR --out DIR
 *    validate --file X.csv --kind summary|ccdf|sweep
 */
import * as fs from "fs";

import { parseCsv } from "./csv";
import { CsvKind, validateContract } from "./contract";
import { FIGURES, FigureId, renderFigure } from "./figures";

function parseFlags(argv: string[]): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    if (!argv[i].startsWith("--") || argv[i + 1] === undefined) {
      throw new Error(`malformed arguments near ${argv[i]}`);
    }
    flags.set(argv[i].slice(2), argv[i + 1]);
  }
  return flags;
}

function need(flags: Map<string, string>, name: string): string {
  const v = flags.get(name);
  if (!v) throw new Error(`missing required flag --${name}`);
  return v;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    if (command === "render") {
      const flags = parseFlags(rest);
      const figure = need(flags, "figure");
      if (!(FIGURES as readonly string[]).includes(figure)) {
        throw new Error(`unknown figure ${figure}; expected one of ${FIGURES.join(", ")}`);
      }
      const outPath = renderFigure(figure as FigureId, need(flags, "in"), need(flags, "out"));
      console.log(`wrote ${outPath}`);
      return 0;
    }
    if (command === "validate") {
      const flags = parseFlags(rest);
      const file = need(flags, "file");
      const kind = need(flags, "kind") as CsvKind;
      if (!["summary", "ccdf", "sweep"].includes(kind)) {
        throw new Error(`unknown kind ${kind}`);
      }
      const violations = validateContract(parseCsv(fs.readFileSync(file, "utf-8")), kind);
      if (violations.length === 0) {
        console.log(`${file}: ok`);
        return 0;
      }
      for (const v of violations) {
        console.error(`${file}: row ${v.row}, column ${v.column}: ${v.message}`);
      }
      return 2;
    }
    throw new Error(`unknown command ${command ?? "<none>"}; expected render or validate`);
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
