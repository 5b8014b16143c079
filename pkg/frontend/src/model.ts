// Wire types for the gateway API, mirrored from the engine's canonical JSON
// encoding. Decoding validates shape so the UI never renders half-parsed data.

export type ActorRole = "seeker" | "wizard" | "system";

export interface OptionItem {
  option_id: string;
  label: string;
}

export type Payload =
  | { kind: "text"; content: string }
  | { kind: "image"; reference: string; caption: string | null }
  | { kind: "audio"; reference: string; transcript: string | null }
  | { kind: "options"; prompt: string; items: OptionItem[] }
  | { kind: "selection"; source_message_id: string; option_id: string };

export interface Message {
  message_id: string;
  conversation_id: string;
  sender: ActorRole;
  payload: Payload;
  timestamp_ms: number;
  in_reply_to: string | null;
  origin_action: string | null;
  confidence: number | null;
}

export type Leg = "seeker_system" | "seeker_wizard" | "wizard_system";

export interface StreamRecord {
  message: Message;
  seq: number;
  leg: Leg;
}

/** A frame pushed to the timeline: either a decoded record or raw junk. */
export type Frame =
  | { ok: true; record: StreamRecord }
  | { ok: false; raw: string };

export class MalformedFrameError extends Error {}

const ROLES = new Set(["seeker", "wizard", "system"]);
const LEGS = new Set(["seeker_system", "seeker_wizard", "wizard_system"]);

function fail(detail: string): never {
  throw new MalformedFrameError(detail);
}

function str(obj: Record<string, unknown>, field: string): string {
  const v = obj[field];
  if (typeof v !== "string") fail(`${field}: expected string`);
  return v;
}

function optStr(obj: Record<string, unknown>, field: string): string | null {
  const v = obj[field] ?? null;
  if (v !== null && typeof v !== "string") fail(`${field}: expected string or null`);
  return v;
}

function decodePayload(raw: unknown): Payload {
  if (typeof raw !== "object" || raw === null || Array.isArray(raw)) fail("payload: expected object");
  const obj = raw as Record<string, unknown>;
  switch (obj.kind) {
    case "text": {
      const content = str(obj, "content");
      if (!content.trim()) fail("payload.content: empty text");
      return { kind: "text", content };
    }
    case "image":
      return { kind: "image", reference: str(obj, "reference"), caption: optStr(obj, "caption") };
    case "audio":
      return { kind: "audio", reference: str(obj, "reference"), transcript: optStr(obj, "transcript") };
    case "options": {
      const items = obj.items;
      if (!Array.isArray(items) || items.length === 0) fail("payload.items: expected non-empty list");
      const decoded = items.map((it) => {
        if (typeof it !== "object" || it === null) fail("payload.items: expected objects");
        const entry = it as Record<string, unknown>;
        return { option_id: str(entry, "option_id"), label: str(entry, "label") };
      });
      return { kind: "options", prompt: str(obj, "prompt"), items: decoded };
    }
    case "selection":
      return {
        kind: "selection",
        source_message_id: str(obj, "source_message_id"),
        option_id: str(obj, "option_id"),
      };
    default:
      fail(`payload.kind: unknown kind ${JSON.stringify(obj.kind)}`);
  }
}

export function decodeMessage(raw: unknown): Message {
  if (typeof raw !== "object" || raw === null) fail("message: expected object");
  const obj = raw as Record<string, unknown>;
  const sender = str(obj, "sender");
  if (!ROLES.has(sender)) fail(`sender: unknown role ${JSON.stringify(sender)}`);
  const ts = obj.timestamp_ms;
  if (typeof ts !== "number" || !Number.isInteger(ts) || ts < 0) fail("timestamp_ms: expected non-negative integer");
  const confidence = obj.confidence ?? null;
  if (confidence !== null && (typeof confidence !== "number" || confidence < 0 || confidence > 1)) {
    fail("confidence: expected number in [0, 1]");
  }
  return {
    message_id: str(obj, "message_id"),
    conversation_id: str(obj, "conversation_id"),
    sender: sender as ActorRole,
    payload: decodePayload(obj.payload),
    timestamp_ms: ts,
    in_reply_to: optStr(obj, "in_reply_to"),
    origin_action: optStr(obj, "origin_action"),
    confidence,
  };
}

/** Decode one NDJSON line from the stream endpoint. */
export function decodeRecord(line: string): StreamRecord {
  let parsed: unknown;
  try {
    parsed = JSON.parse(line);
  } catch {
    fail("frame is not valid JSON");
  }
  const obj = parsed as Record<string, unknown>;
  const seq = obj.seq;
  if (typeof seq !== "number" || !Number.isInteger(seq) || seq < 1) fail("seq: expected positive integer");
  const leg = obj.leg;
  if (typeof leg !== "string" || !LEGS.has(leg)) fail(`leg: unknown leg ${JSON.stringify(leg)}`);
  const { seq: _seq, leg: _leg, ...messageFields } = obj;
  return { message: decodeMessage(messageFields), seq, leg: leg as Leg };
}
