// Sidebar frame lifecycle. The panel lives in its own iframe so page styles
// cannot leak in, and it is position: fixed so mounting never reflows the page.

export const SIDEBAR_FRAME_ID = "clipdeck-sidebar-frame";
export const SIDEBAR_WIDTH_PX = 360;

export interface ToggleCombo {
  key: string;
  altKey: boolean;
  shiftKey: boolean;
}

// Alt+Shift+C, chosen to stay clear of common browser bindings.
export const DEFAULT_TOGGLE_COMBO: ToggleCombo = {
  key: "C",
  altKey: true,
  shiftKey: true,
};

export function mountSidebar(doc: Document, src = "about:blank"): HTMLIFrameElement {
  const existing = doc.getElementById(SIDEBAR_FRAME_ID);
  if (existing instanceof HTMLIFrameElement) return existing;
  const frame = doc.createElement("iframe");
  frame.id = SIDEBAR_FRAME_ID;
  frame.src = src;
  Object.assign(frame.style, {
    position: "fixed",
    top: "0",
    right: "0",
    width: `${SIDEBAR_WIDTH_PX}px`,
    height: "100vh",
    border: "0",
    zIndex: "2147483646",
    boxShadow: "0 0 16px rgba(0, 0, 0, 0.18)",
    background: "#fff",
  });
  doc.documentElement.appendChild(frame);
  return frame;
}

export function unmountSidebar(doc: Document): boolean {
  const frame = doc.getElementById(SIDEBAR_FRAME_ID);
  if (!frame) return false;
  frame.remove();
  return true;
}

export function sidebarVisible(doc: Document): boolean {
  return doc.getElementById(SIDEBAR_FRAME_ID) !== null;
}

export function toggleSidebar(doc: Document, src?: string): boolean {
  if (unmountSidebar(doc)) return false;
  mountSidebar(doc, src);
  return true;
}

export function matchesToggleCombo(
  event: KeyboardEvent,
  combo: ToggleCombo = DEFAULT_TOGGLE_COMBO,
): boolean {
  return (
    event.key.toUpperCase() === combo.key.toUpperCase() &&
    event.altKey === combo.altKey &&
    event.shiftKey === combo.shiftKey
  );
}

// Returns the uninstaller so callers can tear the listener down.
export function installToggleShortcut(
  doc: Document,
  combo: ToggleCombo = DEFAULT_TOGGLE_COMBO,
  src?: string,
): () => void {
  const onKeyDown = (event: KeyboardEvent) => {
    if (!matchesToggleCombo(event, combo)) return;
    event.preventDefault();
    toggleSidebar(doc, src);
  };
  doc.addEventListener("keydown", onKeyDown);
  return () => doc.removeEventListener("keydown", onKeyDown);
}
