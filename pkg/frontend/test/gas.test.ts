import { concat, hexlify, keccak256 } from "ethers";
import { describe, expect, it } from "vitest";

import { EscrowHarness, HELPER, SERVER } from "../src/evm.js";

const MESSAGE = hexlify(new Uint8Array(32).fill(0x4d));
const WITNESS = hexlify(new Uint8Array(16).fill(0x77));

async function initializeGas(z: number): Promise<bigint> {
  const escrow = await EscrowHarness.create();
  const deadlines = Array.from({ length: z }, (_, i) => 2000 + 10 * (i + 1));
  const coins = Array.from({ length: z }, () => 5);
  const result = await escrow.call("initialize", [deadlines, coins, HELPER], {
    from: SERVER,
    value: BigInt(5 * z),
    timestamp: 1000n,
  });
  expect(result.reverted).toBe(false);
  return result.gasUsed;
}

async function registerGas(z: number): Promise<bigint> {
  const escrow = await EscrowHarness.create();
  const deadlines = Array.from({ length: z }, (_, i) => 2000 + 10 * (i + 1));
  const coins = Array.from({ length: z }, () => 5);
  const commitments = Array.from({ length: z }, () => keccak256(concat([MESSAGE, WITNESS])));

  const init = await escrow.call("initialize", [deadlines, coins, HELPER], {
    from: SERVER,
    value: BigInt(5 * z),
    timestamp: 1000n,
  });
  expect(init.reverted).toBe(false);
  const commit = await escrow.call("commitPuzzles", [commitments], {
    from: HELPER,
    timestamp: 1001n,
  });
  expect(commit.reverted).toBe(false);

  const result = await escrow.call("registerSolution", [1, MESSAGE, WITNESS], {
    from: HELPER,
    timestamp: 1500n,
  });
  expect(result.reverted).toBe(false);
  expect(await escrow.view("getV", [1])).toBe(1n);
  return result.gasUsed;
}

describe("gas shape", () => {
  it("registerSolution cost is flat across chain lengths 1, 10, 100", async () => {
    const samples = [await registerGas(1), await registerGas(10), await registerGas(100)];
    const min = samples.reduce((a, b) => (b < a ? b : a));
    const max = samples.reduce((a, b) => (b > a ? b : a));
    const spread = Number(max - min) / Number(min);
    expect(spread).toBeLessThan(0.1);
  });

  it("initialize cost grows with the number of escrowed slots", async () => {
    const atTen = await initializeGas(10);
    const atHundred = await initializeGas(100);
    const ratio = Number(atHundred) / Number(atTen);
    expect(ratio).toBeGreaterThanOrEqual(8);
    expect(ratio).toBeLessThanOrEqual(12);
  });
});
