// Reader panel: the server's depth-first flattening rendered as one flat
// list, indented by depth. Order and nesting come entirely from the server.

import type { ReaderEntryDto, RepresentationDto } from "./types.js";

export const READER_CLASS = "clipdeck-reader";
export const ROW_CLASS = "clipdeck-reader-row";
export const INDENT_PX = 16;

function bodyText(representations: RepresentationDto[]): string | null {
  for (const kind of ["SELECTION_TEXT", "EXTRACTED_TEXT", "RECOGNIZED_TEXT"]) {
    const match = representations.find((rep) => rep.repr_kind === kind && rep.text);
    if (match?.text) return match.text;
  }
  return null;
}

export function renderReader(doc: Document, entries: ReaderEntryDto[]): HTMLElement {
  const panel = doc.createElement("div");
  panel.className = READER_CLASS;
  for (const entry of entries) {
    const row = doc.createElement("div");
    row.className = ROW_CLASS;
    row.dataset.cardId = entry.card.id;
    row.dataset.depth = String(entry.depth);
    row.style.marginLeft = `${entry.depth * INDENT_PX}px`;
    row.style.padding = "4px 8px";

    const title = doc.createElement("div");
    title.textContent = entry.card.title;
    title.style.fontWeight = entry.card.kind === "FOLDER" ? "600" : "400";
    row.appendChild(title);

    const text = bodyText(entry.card.representations);
    if (text !== null) {
      const body = doc.createElement("div");
      body.textContent = text;
      body.style.color = "#444";
      row.appendChild(body);
    }
    if (entry.card.annotation) {
      const note = doc.createElement("div");
      note.textContent = entry.card.annotation;
      note.style.fontStyle = "italic";
      row.appendChild(note);
    }
    panel.appendChild(row);
  }
  return panel;
}
