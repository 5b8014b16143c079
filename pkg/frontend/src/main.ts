// Page bootstrap: pick a role and conversation from the query string, create
// one if needed, then mount the matching pane. All state lives on the server;
// refreshing the page rebuilds the transcript from the stream.

import { GatewayClient } from "./api.js";
import { SeekerPane } from "./seeker.js";
import { WizardConsole } from "./wizard.js";

export interface PageParams {
  base: string;
  role: "seeker" | "wizard";
  conversationId: string | null;
  mode: "direct" | "woz";
}

export function parseParams(search: string, defaultBase: string): PageParams {
  const params = new URLSearchParams(search);
  const role = params.get("role") === "wizard" ? "wizard" : "seeker";
  const mode = params.get("mode") === "woz" || role === "wizard" ? "woz" : "direct";
  return {
    base: params.get("base") ?? defaultBase,
    role,
    conversationId: params.get("conversation"),
    mode,
  };
}

export async function mount(doc: Document, rootId: string, params: PageParams): Promise<void> {
  const root = doc.getElementById(rootId);
  if (!root) throw new Error(`missing #${rootId}`);
  const client = new GatewayClient(params.base);
  const conversationId = params.conversationId ?? (await client.createConversation(params.mode));
  if (params.role === "wizard") {
    const console_ = new WizardConsole(doc, client, conversationId);
    root.appendChild(console_.root);
    await console_.start();
  } else {
    const pane = new SeekerPane(doc, client, conversationId);
    root.appendChild(pane.root);
    pane.start();
  }
  const link = doc.createElement("div");
  link.className = "conversation-id";
  link.textContent = `conversation: ${conversationId}`;
  root.appendChild(link);
}

if (typeof window !== "undefined" && typeof document !== "undefined" && document.getElementById("app")) {
  const params = parseParams(window.location.search, "http://127.0.0.1:8000");
  void mount(document, "app", params);
}
