// Region clipping: draw a box over the page, ship the intersecting elements
// to the server, and let the server-side resolver pick the matching node.
// The client never scores candidates itself; it only collects them.

import type { ApiClient, CapturePlacement } from "./api.js";
import type {
  BBoxWire,
  CaptureContextWire,
  CaptureReply,
  LayoutNodeWire,
} from "./types.js";

export interface Rect {
  x: number;
  y: number;
  width: number;
  height: number;
}

export type RectProvider = (element: Element) => Rect;

export function domRect(element: Element): Rect {
  const box = element.getBoundingClientRect();
  return { x: box.x, y: box.y, width: box.width, height: box.height };
}

function intersects(a: Rect, b: Rect): boolean {
  const overlapW = Math.min(a.x + a.width, b.x + b.width) - Math.max(a.x, b.x);
  const overlapH = Math.min(a.y + a.height, b.y + b.height) - Math.max(a.y, b.y);
  return overlapW > 0 && overlapH > 0;
}

// Walk the subtree in document order, keeping elements whose rect overlaps
// the drawn box. Ids follow walk order, so a smaller id means an earlier
// element; depth counts steps below the walk root.
export function collectLayoutNodes(
  root: Element,
  bbox: Rect,
  rectOf: RectProvider = domRect,
): LayoutNodeWire[] {
  const nodes: LayoutNodeWire[] = [];
  let nextId = 1;
  const walk = (element: Element, depth: number) => {
    const rect = rectOf(element);
    const id = nextId;
    nextId += 1;
    if (rect.width > 0 && rect.height > 0 && intersects(rect, bbox)) {
      nodes.push({
        id,
        depth,
        rect: [rect.x, rect.y, rect.width, rect.height],
        markup: element.outerHTML,
        text: element.textContent ?? "",
      });
    }
    for (const child of Array.from(element.children)) walk(child, depth + 1);
  };
  walk(root, 0);
  return nodes;
}

export interface RegionSelection {
  onComplete: (bbox: Rect) => void;
  onCancel?: () => void;
}

export const OVERLAY_ID = "clipdeck-region-overlay";

// Full-page overlay: mouse down starts the box, mouse up commits it,
// Escape cancels. A cancelled selection makes no network call.
export function beginRegionClip(doc: Document, selection: RegionSelection): HTMLElement {
  const overlay = doc.createElement("div");
  overlay.id = OVERLAY_ID;
  Object.assign(overlay.style, {
    position: "fixed",
    inset: "0",
    cursor: "crosshair",
    zIndex: "2147483647",
    background: "rgba(0, 0, 0, 0.08)",
  });
  const box = doc.createElement("div");
  Object.assign(box.style, {
    position: "fixed",
    border: "1px dashed #1a73e8",
    background: "rgba(26, 115, 232, 0.12)",
    display: "none",
  });
  overlay.appendChild(box);

  let startX = 0;
  let startY = 0;
  let dragging = false;

  const currentBox = (event: MouseEvent): Rect => ({
    x: Math.min(startX, event.clientX),
    y: Math.min(startY, event.clientY),
    width: Math.abs(event.clientX - startX),
    height: Math.abs(event.clientY - startY),
  });

  const teardown = () => {
    overlay.remove();
    doc.removeEventListener("keydown", onKeyDown, true);
  };

  const onKeyDown = (event: KeyboardEvent) => {
    if (event.key !== "Escape") return;
    event.preventDefault();
    teardown();
    selection.onCancel?.();
  };

  overlay.addEventListener("mousedown", (event) => {
    dragging = true;
    startX = event.clientX;
    startY = event.clientY;
    box.style.display = "block";
  });
  overlay.addEventListener("mousemove", (event) => {
    if (!dragging) return;
    const rect = currentBox(event);
    Object.assign(box.style, {
      left: `${rect.x}px`,
      top: `${rect.y}px`,
      width: `${rect.width}px`,
      height: `${rect.height}px`,
    });
  });
  overlay.addEventListener("mouseup", (event) => {
    if (!dragging) return;
    const rect = currentBox(event);
    teardown();
    if (rect.width > 0 && rect.height > 0) selection.onComplete(rect);
    else selection.onCancel?.();
  });
  doc.addEventListener("keydown", onKeyDown, true);

  doc.documentElement.appendChild(overlay);
  return overlay;
}

export interface RegionCaptureOptions {
  rectOf?: RectProvider;
  screenshotB64?: string;
  placement?: CapturePlacement;
}

export async function captureRegion(
  client: ApiClient,
  projectId: string,
  ctx: CaptureContextWire,
  bbox: Rect,
  root: Element,
  options: RegionCaptureOptions = {},
): Promise<CaptureReply> {
  const nodes = collectLayoutNodes(root, bbox, options.rectOf ?? domRect);
  const wireBox: BBoxWire = {
    x: bbox.x,
    y: bbox.y,
    width: bbox.width,
    height: bbox.height,
  };
  return client.captureRegion(
    projectId,
    ctx,
    wireBox,
    nodes,
    options.screenshotB64,
    options.placement ?? {},
  );
}
