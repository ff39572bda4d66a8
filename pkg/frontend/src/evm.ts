import { Common, Hardfork, Mainnet } from "@ethereumjs/common";
import { createEVM, type EVM } from "@ethereumjs/evm";
import { Account, Address, createAddressFromString, hexToBytes } from "@ethereumjs/util";
import { Interface, type InterfaceAbi } from "ethers";

import { compileEscrow } from "./compile.js";

export const SERVER = "0x1000000000000000000000000000000000000001";
export const HELPER = "0x2000000000000000000000000000000000000002";
export const OUTSIDER = "0x3000000000000000000000000000000000000003";

const FUNDED = [SERVER, HELPER, OUTSIDER];
const START_BALANCE = 10n ** 18n;
const CALL_GAS = 10_000_000n;

function blockAt(timestamp: bigint) {
  return {
    header: {
      number: 1n,
      coinbase: createAddressFromString(SERVER),
      timestamp,
      difficulty: 0n,
      prevRandao: new Uint8Array(32),
      gasLimit: 30_000_000n,
      getBlobGasPrice: () => undefined,
    },
  };
}

export interface CallResult {
  gasUsed: bigint;
  reverted: boolean;
  returnValue: Uint8Array;
}

/** One deployed escrow on a throwaway in-memory EVM. */
export class EscrowHarness {
  readonly evm: EVM;
  readonly iface: Interface;
  readonly address: Address;

  private constructor(evm: EVM, iface: Interface, address: Address) {
    this.evm = evm;
    this.iface = iface;
    this.address = address;
  }

  /** Fresh chain state, funded accounts, contract deployed by the server. */
  static async create(): Promise<EscrowHarness> {
    const common = new Common({ chain: Mainnet, hardfork: Hardfork.Cancun });
    const evm = await createEVM({ common });
    for (const addr of FUNDED) {
      await evm.stateManager.putAccount(
        createAddressFromString(addr),
        new Account(0n, START_BALANCE),
      );
    }
    const artifact = compileEscrow();
    const deployed = await evm.runCall({
      caller: createAddressFromString(SERVER),
      data: hexToBytes(artifact.bytecode as `0x${string}`),
      gasLimit: CALL_GAS,
      block: blockAt(0n),
    });
    if (deployed.execResult.exceptionError !== undefined || deployed.createdAddress === undefined) {
      throw new Error(`deployment failed: ${deployed.execResult.exceptionError?.error}`);
    }
    const iface = new Interface(artifact.abi as InterfaceAbi);
    return new EscrowHarness(evm, iface, deployed.createdAddress);
  }

  /** Send a state-changing call at the given block timestamp. */
  async call(
    fn: string,
    args: unknown[],
    opts: { from?: string; value?: bigint; timestamp?: bigint } = {},
  ): Promise<CallResult> {
    const result = await this.evm.runCall({
      caller: createAddressFromString(opts.from ?? SERVER),
      to: this.address,
      data: hexToBytes(this.iface.encodeFunctionData(fn, args) as `0x${string}`),
      value: opts.value ?? 0n,
      gasLimit: CALL_GAS,
      block: blockAt(opts.timestamp ?? 0n),
    });
    return {
      gasUsed: result.execResult.executionGasUsed,
      reverted: result.execResult.exceptionError !== undefined,
      returnValue: result.execResult.returnValue,
    };
  }

  /** Read-only call; decoded scalar results are returned directly. */
  async view(fn: string, args: unknown[] = []): Promise<unknown> {
    const result = await this.call(fn, args);
    if (result.reverted) {
      throw new Error(`view ${fn}(${args.join(",")}) reverted`);
    }
    const decoded = this.iface.decodeFunctionResult(
      fn,
      "0x" + Buffer.from(result.returnValue).toString("hex"),
    );
    return decoded.length === 1 ? decoded[0] : decoded.toArray();
  }

  async balance(addr: string | Address): Promise<bigint> {
    const address = typeof addr === "string" ? createAddressFromString(addr) : addr;
    const account = await this.evm.stateManager.getAccount(address);
    return account?.balance ?? 0n;
  }
}
