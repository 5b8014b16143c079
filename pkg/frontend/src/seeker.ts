// Seeker chat pane: a timeline fed only by the server stream (no optimistic
// echo) plus a composer. Option clicks post selections referencing the
// rendered options message.

import { GatewayClient, TimelinePoller } from "./api.js";
import type { Message, OptionItem } from "./model.js";
import { Timeline } from "./timeline.js";

export class SeekerPane {
  readonly root: HTMLElement;
  readonly composer: HTMLInputElement;
  readonly sendButton: HTMLButtonElement;
  readonly status: HTMLElement;
  readonly timeline: Timeline;
  readonly poller: TimelinePoller;
  private sending = false;

  constructor(
    doc: Document,
    private client: GatewayClient,
    private conversationId: string,
    pollIntervalMs = 200,
  ) {
    this.root = doc.createElement("section");
    this.root.className = "seeker-pane";
    const transcript = doc.createElement("div");
    transcript.className = "transcript";
    this.composer = doc.createElement("input");
    this.composer.type = "text";
    this.composer.placeholder = "Ask something...";
    this.sendButton = doc.createElement("button");
    this.sendButton.type = "button";
    this.sendButton.textContent = "Send";
    this.status = doc.createElement("span");
    this.status.className = "status";
    const footer = doc.createElement("footer");
    footer.append(this.composer, this.sendButton, this.status);
    this.root.append(transcript, footer);

    this.timeline = new Timeline(transcript, {
      attachmentUrl: (ref) => client.attachmentUrl(ref),
      onOptionClick: (source, option) => void this.selectOption(source, option),
    });
    this.poller = new TimelinePoller(
      client,
      conversationId,
      "seeker",
      (frame) => this.timeline.push(frame),
      (connected) => this.setConnected(connected),
      pollIntervalMs,
    );
    this.sendButton.addEventListener("click", () => void this.sendText());
    this.composer.addEventListener("keydown", (event) => {
      if ((event as KeyboardEvent).key === "Enter") void this.sendText();
    });
  }

  start(): void {
    this.poller.start();
  }

  stop(): void {
    this.poller.stop();
  }

  private setConnected(connected: boolean): void {
    this.status.textContent = connected ? "connected" : "disconnected";
    this.sendButton.disabled = !connected || this.sending;
  }

  /** Empty composer input never issues a request; failures keep the draft. */
  async sendText(): Promise<void> {
    const content = this.composer.value.trim();
    if (!content || this.sending) return;
    this.sending = true;
    this.sendButton.disabled = true;
    try {
      await this.client.postSeekerMessage(this.conversationId, { kind: "text", content });
      this.composer.value = "";
      this.status.textContent = "connected";
    } catch {
      this.status.textContent = "send failed, press Send to retry";
    } finally {
      this.sending = false;
      this.sendButton.disabled = false;
    }
  }

  async selectOption(source: Message, option: OptionItem): Promise<void> {
    if (this.sending) return;
    this.sending = true;
    try {
      await this.client.postSeekerMessage(this.conversationId, {
        kind: "selection",
        source_message_id: source.message_id,
        option_id: option.option_id,
      });
    } catch {
      this.status.textContent = "selection failed, click again to retry";
    } finally {
      this.sending = false;
    }
  }
}
