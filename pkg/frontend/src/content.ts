// Content script: owns the sidebar frame on the page and runs capture
// gestures that need page access (region selection, text selection).

import { ApiClient } from "./api.js";
import { matchesToggleCombo, toggleSidebar } from "./inject.js";
import { beginRegionClip, captureRegion } from "./regionClip.js";
import type { CaptureContextWire } from "./types.js";

export const SERVICE_URL = "http://127.0.0.1:8765";

export function pageContext(doc: Document): CaptureContextWire {
  return { url: doc.location.href, title: doc.title };
}

type ShellMessage =
  | { type: "toggle-sidebar" }
  | { type: "begin-region-clip"; projectId: string }
  | { type: "capture-selection"; projectId: string };

function isShellMessage(message: unknown): message is ShellMessage {
  return (
    typeof message === "object" &&
    message !== null &&
    typeof (message as { type?: unknown }).type === "string"
  );
}

export function handleShellMessage(
  doc: Document,
  client: ApiClient,
  message: unknown,
): void {
  if (!isShellMessage(message)) return;
  if (message.type === "toggle-sidebar") {
    toggleSidebar(doc, chrome.runtime.getURL("sidebar.html"));
    return;
  }
  if (message.type === "begin-region-clip") {
    beginRegionClip(doc, {
      onComplete: (bbox) => {
        void captureRegion(client, message.projectId, pageContext(doc), bbox, doc.body);
      },
    });
    return;
  }
  if (message.type === "capture-selection") {
    const selection = doc.getSelection()?.toString() ?? "";
    if (selection.trim() === "") return;
    void client.captureText(message.projectId, pageContext(doc), selection);
  }
}

export function startContentScript(doc: Document): void {
  const client = new ApiClient(SERVICE_URL);
  doc.addEventListener("keydown", (event) => {
    if (!matchesToggleCombo(event)) return;
    event.preventDefault();
    toggleSidebar(doc, chrome.runtime.getURL("sidebar.html"));
  });
  chrome.runtime.onMessage.addListener((message) => {
    handleShellMessage(doc, client, message);
  });
}

if (typeof chrome !== "undefined" && typeof document !== "undefined") {
  startContentScript(document);
}
