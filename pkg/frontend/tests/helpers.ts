import { inject } from "vitest";

import { GatewayClient } from "../src/api.js";
import type { StreamRecord } from "../src/model.js";

export function client(): GatewayClient {
  return new GatewayClient(inject("gatewayBase"));
}

export async function waitFor(check: () => boolean, timeoutMs = 15000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (check()) return;
    await new Promise((resolve) => setTimeout(resolve, 50));
  }
  throw new Error("condition not met in time");
}

/** Full wizard-visibility projection of one conversation's log. */
export async function logRecords(gw: GatewayClient, conversationId: string): Promise<StreamRecord[]> {
  const frames = await gw.fetchRecords(conversationId, 0, "wizard");
  return frames.flatMap((f) => (f.ok ? [f.record] : []));
}
