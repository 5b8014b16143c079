// Timeline rendering: one DOM element per message, multi-modal payloads, and
// a visible placeholder for anything undecodable so the transcript never
// silently drops a frame.

import type { Frame, Message, OptionItem } from "./model.js";

export interface TimelineHandlers {
  attachmentUrl(reference: string): string;
  onOptionClick?(source: Message, option: OptionItem): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderMessage(doc: Document, m: Message, handlers: TimelineHandlers): HTMLElement {
  const bubble = el(doc, "div", `msg msg-${m.sender}`);
  bubble.dataset.messageId = m.message_id;
  bubble.dataset.sender = m.sender;
  const p = m.payload;
  if (p.kind === "text") {
    bubble.appendChild(el(doc, "div", "msg-text", p.content));
  } else if (p.kind === "image") {
    const img = el(doc, "img", "msg-image");
    img.src = handlers.attachmentUrl(p.reference);
    img.alt = p.caption ?? "image attachment";
    bubble.appendChild(img);
    if (p.caption) bubble.appendChild(el(doc, "div", "msg-caption", p.caption));
  } else if (p.kind === "audio") {
    const audio = el(doc, "audio", "msg-audio");
    audio.controls = true;
    audio.src = handlers.attachmentUrl(p.reference);
    bubble.appendChild(audio);
    if (p.transcript) bubble.appendChild(el(doc, "div", "msg-caption", p.transcript));
  } else if (p.kind === "options") {
    bubble.appendChild(el(doc, "div", "msg-text", p.prompt));
    const list = el(doc, "ol", "msg-options");
    for (const item of p.items) {
      const li = el(doc, "li", "msg-option");
      const button = el(doc, "button", "msg-option-button", item.label);
      button.type = "button";
      button.dataset.optionId = item.option_id;
      button.addEventListener("click", () => handlers.onOptionClick?.(m, item));
      li.appendChild(button);
      list.appendChild(li);
    }
    bubble.appendChild(list);
  } else {
    bubble.appendChild(el(doc, "div", "msg-selection", `selected: ${p.option_id}`));
  }
  return bubble;
}

export function renderPlaceholder(doc: Document): HTMLElement {
  return el(doc, "div", "msg msg-error", "message could not be displayed");
}

/**
 * Appends frames to a container in arrival (seq) order, deduplicating by seq
 * so a reconnect replay produces the same transcript as one long session.
 */
export class Timeline {
  private seenSeq = new Set<number>();

  constructor(
    private container: HTMLElement,
    private handlers: TimelineHandlers,
  ) {}

  push(frame: Frame): void {
    const doc = this.container.ownerDocument;
    if (!frame.ok) {
      this.container.appendChild(renderPlaceholder(doc));
      return;
    }
    if (this.seenSeq.has(frame.record.seq)) return;
    this.seenSeq.add(frame.record.seq);
    this.container.appendChild(renderMessage(doc, frame.record.message, this.handlers));
  }

  get size(): number {
    return this.container.children.length;
  }
}
