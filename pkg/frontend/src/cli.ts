import { existsSync, mkdirSync, writeFileSync } from "fs";
import { dirname } from "path";
import { parseArgs } from "node:util";
import { FIGURE_KINDS, FigureKind, FigureSpec, renderFigure } from "./figures";

const USAGE =
  "usage: render --kind <" +
  FIGURE_KINDS.join("|") +
  "> [--in records.csv ...] --out figure.svg [--epsilon E] [--n N]";

/** Run the render command; returns the process exit code. */
export function main(argv: string[]): number {
  if (argv[0] !== "render") {
    process.stderr.write(`error: unknown command '${argv[0] ?? ""}'\n${USAGE}\n`);
    return 2;
  }
  let parsed;
  try {
    parsed = parseArgs({
      args: argv.slice(1),
      options: {
        kind: { type: "string" },
        in: { type: "string", multiple: true },
        out: { type: "string" },
        epsilon: { type: "string" },
        n: { type: "string" },
      },
      allowPositionals: false,
    });
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n${USAGE}\n`);
    return 2;
  }
  const { kind, in: inputs = [], out, epsilon, n } = parsed.values;
  if (!kind || !out) {
    process.stderr.write(`error: --kind and --out are required\n${USAGE}\n`);
    return 2;
  }
  if (!(FIGURE_KINDS as string[]).includes(kind)) {
    process.stderr.write(`error: unknown figure kind '${kind}'; valid: ${FIGURE_KINDS.join(", ")}\n`);
    return 2;
  }
  for (const path of inputs) {
    if (!existsSync(path)) {
      process.stderr.write(`error: input file not found: ${path}\n`);
      return 2;
    }
  }
  const spec: FigureSpec = {
    kind: kind as FigureKind,
    inputs,
    epsilon: epsilon === undefined ? undefined : Number(epsilon),
    n: n === undefined ? undefined : Number(n),
  };
  if (spec.epsilon !== undefined && !(spec.epsilon > 0)) {
    process.stderr.write("error: --epsilon must be a positive number\n");
    return 2;
  }
  if (spec.n !== undefined && !(Number.isInteger(spec.n) && spec.n >= 4)) {
    process.stderr.write("error: --n must be an integer >= 4\n");
    return 2;
  }
  let svg: string;
  try {
    svg = renderFigure(spec);
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
  const dir = dirname(out);
  if (dir && dir !== ".") mkdirSync(dir, { recursive: true });
  writeFileSync(out, svg, "utf8");
  process.stdout.write(`${out}\n`);
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
