import { readFileSync } from "node:fs";
import { createRequire } from "node:module";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

const require = createRequire(import.meta.url);
// emscripten build; loaded through require so vite never transforms it
const solc = require("solc");

export interface Artifact {
  abi: unknown[];
  bytecode: string;
}

let cached: Artifact | undefined;

/** Compile contracts/TimelockEscrow.sol once per process. */
export function compileEscrow(): Artifact {
  if (cached) {
    return cached;
  }
  const root = join(dirname(fileURLToPath(import.meta.url)), "..");
  const source = readFileSync(join(root, "contracts", "TimelockEscrow.sol"), "utf8");
  const input = {
    language: "Solidity",
    sources: { "TimelockEscrow.sol": { content: source } },
    settings: {
      optimizer: { enabled: true, runs: 200 },
      evmVersion: "cancun",
      outputSelection: { "*": { "*": ["abi", "evm.bytecode.object"] } },
    },
  };
  const output = JSON.parse(solc.compile(JSON.stringify(input)));
  const errors = (output.errors ?? []).filter(
    (e: { severity: string }) => e.severity === "error",
  );
  if (errors.length > 0) {
    throw new Error(errors.map((e: { formattedMessage: string }) => e.formattedMessage).join("\n"));
  }
  const contract = output.contracts["TimelockEscrow.sol"]["TimelockEscrow"];
  cached = {
    abi: contract.abi,
    bytecode: "0x" + contract.evm.bytecode.object,
  };
  return cached;
}
