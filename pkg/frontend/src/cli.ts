#!/usr/bin/env node
/** CLI: cglab-plot --spec <plotspec.json> [--spec <...> ...] */

import { renderSpecFile } from "./plot.js";
import { SchemaError } from "./schema.js";

function main(argv: string[]): number {
  const specs: string[] = [];
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--spec") {
      const value = argv[++i];
      if (!value) {
        console.error("error: --spec needs a file path");
        return 2;
      }
      specs.push(value);
    } else if (argv[i] === "--help" || argv[i] === "-h") {
      console.log("usage: cglab-plot --spec plotspec.json [--spec another.json ...]");
      return 0;
    } else {
      console.error(`error: unknown argument ${argv[i]}`);
      return 2;
    }
  }
  if (specs.length === 0) {
    console.error("error: at least one --spec is required");
    return 2;
  }
  for (const path of specs) {
    try {
      const spec = renderSpecFile(path);
      console.log(`wrote ${spec.output_path}`);
    } catch (err) {
      if (err instanceof SchemaError) {
        console.error(`error: ${err.message}`);
        return 1;
      }
      throw err;
    }
  }
  return 0;
}

process.exitCode = main(process.argv.slice(2));
