// Wizard dual-pane console. Left: the live seeker conversation (seeker-wizard
// leg). Right: the system workbench, where the wizard queries the engine and
// forwards or composes replies to the seeker. Routing mirrors the gateway's
// leg model, fed from the wizard's full-visibility stream.

import { GatewayClient, TimelinePoller } from "./api.js";
import type { Frame, Message, OptionItem } from "./model.js";
import { Timeline } from "./timeline.js";

export class WizardConsole {
  readonly root: HTMLElement;
  readonly leftTimeline: Timeline;
  readonly rightTimeline: Timeline;
  readonly queryInput: HTMLInputElement;
  readonly queryButton: HTMLButtonElement;
  readonly replyInput: HTMLInputElement;
  readonly replyButton: HTMLButtonElement;
  readonly status: HTMLElement;
  readonly poller: TimelinePoller;
  private busy = false;

  constructor(
    doc: Document,
    private client: GatewayClient,
    private conversationId: string,
    pollIntervalMs = 200,
  ) {
    this.root = doc.createElement("section");
    this.root.className = "wizard-console";

    const left = doc.createElement("div");
    left.className = "pane pane-seeker";
    const leftTranscript = doc.createElement("div");
    leftTranscript.className = "transcript";
    this.replyInput = doc.createElement("input");
    this.replyInput.type = "text";
    this.replyInput.placeholder = "Reply to seeker...";
    this.replyButton = doc.createElement("button");
    this.replyButton.type = "button";
    this.replyButton.textContent = "Send to seeker";
    left.append(leftTranscript, this.replyInput, this.replyButton);

    const right = doc.createElement("div");
    right.className = "pane pane-system";
    const rightTranscript = doc.createElement("div");
    rightTranscript.className = "transcript";
    this.queryInput = doc.createElement("input");
    this.queryInput.type = "text";
    this.queryInput.placeholder = "Query the system...";
    this.queryButton = doc.createElement("button");
    this.queryButton.type = "button";
    this.queryButton.textContent = "Run query";
    right.append(rightTranscript, this.queryInput, this.queryButton);

    this.status = doc.createElement("span");
    this.status.className = "status";
    this.root.append(left, right, this.status);

    this.leftTimeline = new Timeline(leftTranscript, {
      attachmentUrl: (ref) => client.attachmentUrl(ref),
    });
    // Clicking a ranked result in the workbench forwards it to the seeker.
    this.rightTimeline = new Timeline(rightTranscript, {
      attachmentUrl: (ref) => client.attachmentUrl(ref),
      onOptionClick: (source, option) => void this.forwardResult(source, option),
    });
    this.poller = new TimelinePoller(
      client,
      conversationId,
      "wizard",
      (frame) => this.route(frame),
      (connected) => this.setConnected(connected),
      pollIntervalMs,
    );
    this.queryButton.addEventListener("click", () => void this.querySystem());
    this.replyButton.addEventListener("click", () => void this.replyToSeeker());
  }

  async start(): Promise<void> {
    await this.client.attachWizard(this.conversationId);
    this.poller.start();
  }

  stop(): void {
    this.poller.stop();
  }

  private route(frame: Frame): void {
    if (!frame.ok) {
      this.leftTimeline.push(frame);
      return;
    }
    if (frame.record.leg === "wizard_system") this.rightTimeline.push(frame);
    else this.leftTimeline.push(frame);
  }

  private setConnected(connected: boolean): void {
    this.status.textContent = connected ? "connected" : "disconnected";
    this.queryButton.disabled = !connected || this.busy;
    this.replyButton.disabled = !connected || this.busy;
  }

  async querySystem(): Promise<void> {
    const content = this.queryInput.value.trim();
    if (!content || this.busy) return;
    this.busy = true;
    try {
      await this.client.postWizardMessage(this.conversationId, "to_system", { kind: "text", content });
      this.queryInput.value = "";
    } catch {
      this.status.textContent = "query failed, press Run query to retry";
    } finally {
      this.busy = false;
    }
  }

  async replyToSeeker(): Promise<void> {
    const content = this.replyInput.value.trim();
    if (!content || this.busy) return;
    this.busy = true;
    try {
      await this.client.postWizardMessage(this.conversationId, "to_seeker", { kind: "text", content });
      this.replyInput.value = "";
    } catch {
      this.status.textContent = "reply failed, press Send to retry";
    } finally {
      this.busy = false;
    }
  }

  /** Forward one ranked result (its label: title plus snippet) to the seeker. */
  async forwardResult(_source: Message, option: OptionItem): Promise<void> {
    if (this.busy) return;
    this.busy = true;
    try {
      await this.client.postWizardMessage(this.conversationId, "to_seeker", {
        kind: "text",
        content: option.label,
      });
    } catch {
      this.status.textContent = "forward failed, click again to retry";
    } finally {
      this.busy = false;
    }
  }
}
