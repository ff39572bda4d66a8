import { readFileSync, readdirSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { EscrowHarness, HELPER, SERVER } from "../src/evm.js";

interface Trace {
  name: string;
  z: number;
  start: number;
  deadlines: number[];
  coins: number[];
  commitments: string[];
  calls: Array<{ op: string; t: number; j?: number; m?: string; pi?: string }>;
  expected: {
    reverts: boolean[];
    v: Array<boolean | null>;
    u: Array<boolean | null>;
    helperGain: number;
    serverRefund: number;
    escrowHeld: number;
  };
}

const TRACE_DIR = join(dirname(fileURLToPath(import.meta.url)), "..", "traces");

function loadTraces(): Trace[] {
  const files = readdirSync(TRACE_DIR)
    .filter((f) => f.endsWith(".json"))
    .sort();
  return files.map((f) => JSON.parse(readFileSync(join(TRACE_DIR, f), "utf8")));
}

/** null stays null; the contract's tri-state int8 becomes a boolean. */
function triState(value: bigint): boolean | null {
  if (value === -1n) {
    return null;
  }
  return value === 1n;
}

async function replay(trace: Trace) {
  const escrow = await EscrowHarness.create();
  const total = trace.coins.reduce((a, b) => a + b, 0);
  const serverStart = await escrow.balance(SERVER);
  const helperStart = await escrow.balance(HELPER);

  const init = await escrow.call(
    "initialize",
    [trace.deadlines, trace.coins, HELPER],
    { from: SERVER, value: BigInt(total), timestamp: BigInt(trace.start) },
  );
  expect(init.reverted, `${trace.name}: initialize`).toBe(false);

  const reverts: boolean[] = [];
  for (const call of trace.calls) {
    const at = { timestamp: BigInt(call.t), from: HELPER };
    let result;
    if (call.op === "commitPuzzles") {
      result = await escrow.call("commitPuzzles", [trace.commitments], at);
    } else if (call.op === "registerSolution") {
      result = await escrow.call("registerSolution", [call.j, call.m, call.pi], at);
    } else {
      result = await escrow.call("payOut", [call.j], at);
    }
    reverts.push(result.reverted);
  }

  const v: Array<boolean | null> = [];
  const u: Array<boolean | null> = [];
  for (let j = 1; j <= trace.z; j++) {
    v.push(triState((await escrow.view("getV", [j])) as bigint));
    u.push(triState((await escrow.view("getU", [j])) as bigint));
  }

  return {
    reverts,
    v,
    u,
    helperGain: Number((await escrow.balance(HELPER)) - helperStart),
    serverRefund: Number((await escrow.balance(SERVER)) - (serverStart - BigInt(total))),
    escrowHeld: Number(await escrow.balance(escrow.address)),
  };
}

describe("differential replay against the simulator", () => {
  const traces = loadTraces();

  it("covers 25 recorded traces", () => {
    expect(traces.length).toBe(25);
  });

  for (const trace of traces) {
    it(`agrees on ${trace.name}`, async () => {
      const onChain = await replay(trace);
      expect(onChain.reverts).toEqual(trace.expected.reverts);
      expect(onChain.v).toEqual(trace.expected.v);
      expect(onChain.u).toEqual(trace.expected.u);
      expect(onChain.helperGain).toBe(trace.expected.helperGain);
      expect(onChain.serverRefund).toBe(trace.expected.serverRefund);
      expect(onChain.escrowHeld).toBe(trace.expected.escrowHeld);
    });
  }
});
