// Hover peek: miniatures of a container's direct children, rendered from the
// server's peek entries. At most nine miniatures show; the rest collapse
// into an overflow chip, matching the preview grid's cap.

import type { PeekEntryDto } from "./types.js";

export const PEEK_LIMIT = 9;
export const PEEK_CLASS = "clipdeck-peek";
export const MINIATURE_CLASS = "clipdeck-miniature";
export const OVERFLOW_CLASS = "clipdeck-peek-overflow";

export function renderPeek(
  doc: Document,
  entries: PeekEntryDto[],
  assetUrl: (digest: string) => string,
): HTMLElement {
  const panel = doc.createElement("div");
  panel.className = PEEK_CLASS;
  Object.assign(panel.style, {
    display: "flex",
    flexWrap: "wrap",
    gap: "4px",
    padding: "6px",
    background: "#fff",
    boxShadow: "0 2px 10px rgba(0, 0, 0, 0.2)",
    borderRadius: "6px",
  });
  for (const entry of entries.slice(0, PEEK_LIMIT)) {
    const tile = doc.createElement("div");
    tile.className = MINIATURE_CLASS;
    tile.dataset.cardId = entry.card_id;
    tile.title = entry.title;
    Object.assign(tile.style, {
      width: "72px",
      height: "72px",
      overflow: "hidden",
      border: "1px solid #ddd",
      borderRadius: "4px",
      fontSize: "9px",
    });
    if (entry.image !== null) {
      const img = doc.createElement("img");
      img.src = assetUrl(entry.image);
      img.alt = entry.title;
      Object.assign(img.style, { width: "100%", height: "100%", objectFit: "cover" });
      tile.appendChild(img);
    } else {
      tile.textContent = entry.excerpt ?? entry.title;
    }
    panel.appendChild(tile);
  }
  if (entries.length > PEEK_LIMIT) {
    const chip = doc.createElement("div");
    chip.className = OVERFLOW_CLASS;
    chip.textContent = `+${entries.length - PEEK_LIMIT}`;
    panel.appendChild(chip);
  }
  return panel;
}
