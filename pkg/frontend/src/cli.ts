#!/usr/bin/env node
/** Command line: render one figure from a sweep CSV into an output directory. */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { FIGURES } from "./figures";
import { renderFigure } from "./render";
import { SchemaMismatchError } from "./schema";

export function main(argv: string[]): number {
  const args = yargs(argv)
    .command("render", "render a figure from a sweep CSV", (cmd) =>
      cmd
        .option("csv", {
          type: "string",
          demandOption: true,
          describe: "path to the experiment CSV",
        })
        .option("figure", {
          type: "string",
          demandOption: true,
          choices: Object.keys(FIGURES),
          describe: "which figure to draw",
        })
        .option("out", {
          type: "string",
          default: "figures",
          describe: "output directory for the SVG",
        })
    )
    .demandCommand(1)
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      throw err ?? new Error(msg);
    })
    .parseSync();

  try {
    const spec = FIGURES[args.figure as string];
    const outPath = renderFigure(args.csv as string, spec, args.out as string);
    console.log(outPath);
    return 0;
  } catch (err) {
    if (err instanceof SchemaMismatchError) {
      console.error(`schema mismatch: ${err.message}`);
      return 2;
    }
    if (err instanceof Error && "code" in err) {
      console.error(`io error: ${err.message}`);
      return 3;
    }
    throw err;
  }
}

if (require.main === module) {
  try {
    process.exitCode = main(hideBin(process.argv));
  } catch (err) {
    console.error(err instanceof Error ? err.message : String(err));
    process.exitCode = 2;
  }
}
