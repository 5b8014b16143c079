import { describe, expect, it } from "vitest";

import { decodeMessage, decodeRecord, MalformedFrameError } from "../src/model.js";

const BASE = {
  message_id: "c1-1",
  conversation_id: "c1",
  sender: "seeker",
  payload: { kind: "text", content: "hello" },
  timestamp_ms: 10,
  in_reply_to: null,
  origin_action: null,
  confidence: null,
};

describe("decodeMessage", () => {
  it("accepts a canonical text message", () => {
    const m = decodeMessage(BASE);
    expect(m.message_id).toBe("c1-1");
    expect(m.payload).toEqual({ kind: "text", content: "hello" });
  });

  it("accepts every payload kind", () => {
    const payloads = [
      { kind: "image", reference: "att1", caption: "a parrot" },
      { kind: "audio", reference: "att2", transcript: null },
      { kind: "options", prompt: "pick one", items: [{ option_id: "a", label: "A" }] },
      { kind: "selection", source_message_id: "c1-2", option_id: "a" },
    ];
    for (const payload of payloads) {
      expect(decodeMessage({ ...BASE, payload }).payload.kind).toBe(payload.kind);
    }
  });

  it("rejects unknown payload kinds", () => {
    expect(() => decodeMessage({ ...BASE, payload: { kind: "video", reference: "x" } })).toThrow(
      MalformedFrameError,
    );
  });

  it("rejects blank text and empty options", () => {
    expect(() => decodeMessage({ ...BASE, payload: { kind: "text", content: "   " } })).toThrow();
    expect(() =>
      decodeMessage({ ...BASE, payload: { kind: "options", prompt: "p", items: [] } }),
    ).toThrow();
  });

  it("rejects bad roles, timestamps and confidences", () => {
    expect(() => decodeMessage({ ...BASE, sender: "bot" })).toThrow(MalformedFrameError);
    expect(() => decodeMessage({ ...BASE, timestamp_ms: -1 })).toThrow(MalformedFrameError);
    expect(() => decodeMessage({ ...BASE, confidence: 1.5 })).toThrow(MalformedFrameError);
  });
});

describe("decodeRecord", () => {
  it("decodes a stream line with seq and leg", () => {
    const line = JSON.stringify({ ...BASE, seq: 3, leg: "seeker_wizard" });
    const rec = decodeRecord(line);
    expect(rec.seq).toBe(3);
    expect(rec.leg).toBe("seeker_wizard");
    expect(rec.message.message_id).toBe("c1-1");
  });

  it("rejects junk, missing seq and unknown legs", () => {
    expect(() => decodeRecord("not json at all")).toThrow(MalformedFrameError);
    expect(() => decodeRecord(JSON.stringify({ ...BASE, leg: "seeker_system" }))).toThrow();
    expect(() => decodeRecord(JSON.stringify({ ...BASE, seq: 1, leg: "sideways" }))).toThrow();
  });
});
