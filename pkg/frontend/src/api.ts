// Thin fetch client for the gateway HTTP API plus a replay-based timeline
// poller. The UI holds no engine logic; everything goes through these calls.

import { decodeRecord, type Frame, type Message, type Payload } from "./model.js";

export type FetchFn = typeof fetch;

export interface PostReply {
  message: Message;
  response?: Message;
}

export class GatewayRequestError extends Error {
  constructor(
    public status: number,
    public detail: unknown,
  ) {
    super(`gateway returned ${status}`);
  }
}

export class GatewayClient {
  constructor(
    public baseUrl: string,
    private fetchFn: FetchFn = fetch,
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request(path: string, init?: RequestInit): Promise<unknown> {
    const res = await this.fetchFn(this.baseUrl + path, init);
    const body = await res.json().catch(() => null);
    if (!res.ok) throw new GatewayRequestError(res.status, body);
    return body;
  }

  private post(path: string, body: unknown): Promise<unknown> {
    return this.request(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async createConversation(mode: "direct" | "woz"): Promise<string> {
    const body = (await this.post("/conversations", { mode })) as { conversation_id: string };
    return body.conversation_id;
  }

  postSeekerMessage(conversationId: string, payload: Payload, inReplyTo?: string): Promise<PostReply> {
    const body: Record<string, unknown> = { payload };
    if (inReplyTo) body.in_reply_to = inReplyTo;
    return this.post(`/conversations/${conversationId}/messages`, body) as Promise<PostReply>;
  }

  postWizardMessage(
    conversationId: string,
    target: "to_system" | "to_seeker",
    payload: Payload,
  ): Promise<PostReply> {
    return this.post(`/conversations/${conversationId}/wizard/messages`, {
      target,
      payload,
    }) as Promise<PostReply>;
  }

  async attachWizard(conversationId: string): Promise<void> {
    await this.post(`/conversations/${conversationId}/wizard/attach`, {});
  }

  async fetchRecords(conversationId: string, fromSeq: number, role: "seeker" | "wizard"): Promise<Frame[]> {
    const path = `/conversations/${conversationId}/stream?from_seq=${fromSeq}&role=${role}&follow=false`;
    const res = await this.fetchFn(this.baseUrl + path);
    if (!res.ok) throw new GatewayRequestError(res.status, await res.text());
    const text = await res.text();
    const frames: Frame[] = [];
    for (const line of text.split("\n")) {
      if (!line.trim()) continue;
      try {
        frames.push({ ok: true, record: decodeRecord(line) });
      } catch {
        frames.push({ ok: false, raw: line });
      }
    }
    return frames;
  }

  diagnostics(conversationId: string): Promise<Record<string, unknown>> {
    return this.request(`/conversations/${conversationId}/diagnostics`) as Promise<Record<string, unknown>>;
  }

  async uploadAttachment(data: Blob | ArrayBuffer, contentType: string): Promise<string> {
    const body = (await this.request("/attachments", {
      method: "POST",
      headers: { "content-type": contentType },
      body: data,
    })) as { attachment_id: string };
    return body.attachment_id;
  }

  attachmentUrl(reference: string): string {
    return `${this.baseUrl}/attachments/${reference}`;
  }
}

/**
 * Pulls a conversation's log in seq order by polling the stream endpoint with
 * an advancing from_seq cursor. Replay from the cursor makes reconnects
 * gap-free; consumers dedupe by seq so they are also duplicate-free.
 */
export class TimelinePoller {
  private cursor = 0;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private stopped = false;
  private polling = false;

  constructor(
    private client: GatewayClient,
    private conversationId: string,
    private role: "seeker" | "wizard",
    private onFrame: (frame: Frame) => void,
    private onStatus: (connected: boolean) => void = () => {},
    private intervalMs = 200,
  ) {}

  start(): void {
    this.stopped = false;
    void this.poll();
  }

  stop(): void {
    this.stopped = true;
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = null;
  }

  /** One poll cycle; also usable directly from tests for determinism. */
  async poll(): Promise<void> {
    if (this.polling) return;
    this.polling = true;
    try {
      const frames = await this.client.fetchRecords(this.conversationId, this.cursor, this.role);
      for (const frame of frames) {
        if (frame.ok) this.cursor = Math.max(this.cursor, frame.record.seq + 1);
        this.onFrame(frame);
      }
      this.onStatus(true);
    } catch {
      this.onStatus(false);
    } finally {
      this.polling = false;
    }
    if (!this.stopped) {
      this.timer = setTimeout(() => void this.poll(), this.intervalMs);
    }
  }
}
