#!/usr/bin/env node
/** Command line front end: groupbandits-plots <results.csv> --kind ... */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { EmptyResultsError, render, SchemaError } from "./render.js";

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .usage("$0 <results> --kind <vary_curve|weight_table> --output <file>")
    .command("$0 <results>", "render a plot from sweep results", (y) =>
      y.positional("results", { type: "string", demandOption: true }))
    .option("kind", {
      choices: ["vary_curve", "weight_table"] as const,
      demandOption: true,
    })
    .option("output", { type: "string", demandOption: true })
    .option("summary", {
      type: "string",
      describe: "optional summary.json to validate alongside the CSV",
    })
    .option("x-field", {
      type: "string",
      describe: "results column plotted on the x axis (vary_curve only)",
    })
    .option("log-y", { type: "boolean", default: false })
    .strict()
    .help()
    .parse();

  try {
    render({
      results: args.results as string,
      summary: args.summary,
      kind: args.kind,
      xField: args["x-field"],
      output: args.output,
      logY: args["log-y"],
    });
    console.log(`wrote ${args.output}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError || err instanceof EmptyResultsError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    if (err instanceof Error && "code" in err) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("groupbandits-plots")) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
