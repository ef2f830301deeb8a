// Sidebar controller: holds the active project and its revision, renders the
// overview, and routes every gesture to exactly one API call. All structure
// comes from server read models; re-rendering at the same revision always
// reproduces the same DOM.

import { ApiClient, mutateWithRefresh } from "./api.js";
import { renderPeek } from "./peek.js";
import { renderReader } from "./reader.js";
import type { MutationReply, OverviewDto, OverviewEntryDto } from "./types.js";

export const OVERVIEW_CLASS = "clipdeck-overview";
export const CARD_CLASS = "clipdeck-card";
export const CHILDREN_CLASS = "clipdeck-card-children";
export const PREVIEW_CLASS = "clipdeck-preview-grid";
export const PREVIEW_SQUARE_CLASS = "clipdeck-preview-square";
export const PREVIEW_OVERFLOW_CLASS = "clipdeck-preview-overflow";
export const READER_PANEL_ID = "clipdeck-reader-panel";
export const PEEK_PANEL_ID = "clipdeck-peek-panel";

export interface SidebarState {
  projectId: string | null;
  revision: number;
  readerRoot: string | null;
}

export class SidebarController {
  readonly state: SidebarState = { projectId: null, revision: 0, readerRoot: null };

  constructor(
    private readonly client: ApiClient,
    private readonly doc: Document,
    private readonly root: HTMLElement,
  ) {}

  async load(projectId: string): Promise<void> {
    const overview = await this.client.overview(projectId);
    this.state.projectId = projectId;
    this.applyOverview(overview);
  }

  async refresh(): Promise<void> {
    if (this.state.projectId === null) return;
    this.applyOverview(await this.client.overview(this.state.projectId));
  }

  applyOverview(overview: OverviewDto): void {
    this.state.projectId = overview.project_id;
    this.state.revision = overview.revision;
    this.renderOverview(overview.overview);
  }

  // One mutation at the held revision; a conflict refreshes the view and
  // retries once, keeping the sidebar in step with the winning writer.
  async mutate(op: string, args: Record<string, unknown>): Promise<MutationReply> {
    if (this.state.projectId === null) throw new Error("no active project");
    const reply = await mutateWithRefresh(
      this.client,
      this.state.projectId,
      this.state.revision,
      op,
      args,
      (overview) => this.applyOverview(overview),
    );
    this.state.revision = reply.revision;
    await this.refresh();
    return reply;
  }

  async openReader(rootCardId?: string): Promise<HTMLElement> {
    if (this.state.projectId === null) throw new Error("no active project");
    const reader = await this.client.reader(this.state.projectId, rootCardId);
    this.state.readerRoot = rootCardId ?? null;
    this.closeReader();
    const panel = this.doc.createElement("div");
    panel.id = READER_PANEL_ID;
    panel.appendChild(renderReader(this.doc, reader.entries));
    this.root.appendChild(panel);
    return panel;
  }

  closeReader(): void {
    this.doc.getElementById(READER_PANEL_ID)?.remove();
    this.state.readerRoot = null;
  }

  async showPeek(cardId: string): Promise<HTMLElement> {
    const peek = await this.client.peek(cardId);
    this.hidePeek();
    const panel = this.doc.createElement("div");
    panel.id = PEEK_PANEL_ID;
    panel.appendChild(
      renderPeek(this.doc, peek.entries, (digest) => this.client.assetUrl(digest)),
    );
    this.root.appendChild(panel);
    return panel;
  }

  hidePeek(): void {
    this.doc.getElementById(PEEK_PANEL_ID)?.remove();
  }

  private renderOverview(entries: OverviewEntryDto[]): void {
    const existing = this.root.querySelector(`.${OVERVIEW_CLASS}`);
    existing?.remove();
    const list = this.doc.createElement("div");
    list.className = OVERVIEW_CLASS;
    for (const entry of entries) list.appendChild(this.renderEntry(entry));
    this.root.appendChild(list);
  }

  private renderEntry(entry: OverviewEntryDto): HTMLElement {
    const card = this.doc.createElement("div");
    card.className = CARD_CLASS;
    card.dataset.cardId = entry.card.card_id;
    card.dataset.kind = entry.card.kind;

    if (entry.card.header_image !== null) {
      const img = this.doc.createElement("img");
      img.src = this.client.assetUrl(entry.card.header_image);
      img.alt = entry.card.title;
      img.style.maxWidth = "100%";
      card.appendChild(img);
    }
    const title = this.doc.createElement("div");
    title.textContent = entry.card.title;
    card.appendChild(title);
    if (entry.card.source_host) {
      const host = this.doc.createElement("div");
      host.textContent = entry.card.source_host;
      host.style.color = "#777";
      card.appendChild(host);
    }
    if (entry.card.annotation_excerpt) {
      const note = this.doc.createElement("div");
      note.textContent = entry.card.annotation_excerpt;
      note.style.fontStyle = "italic";
      card.appendChild(note);
    }

    // Bundled children stay hidden behind the preview grid; folder children
    // render inline beneath the label.
    if (entry.preview.squares_shown > 0 || entry.preview.overflow > 0) {
      card.appendChild(this.renderPreviewGrid(entry));
    }
    if (entry.children.length > 0) {
      const children = this.doc.createElement("div");
      children.className = CHILDREN_CLASS;
      children.style.marginLeft = "12px";
      for (const child of entry.children) children.appendChild(this.renderEntry(child));
      card.appendChild(children);
    }
    return card;
  }

  private renderPreviewGrid(entry: OverviewEntryDto): HTMLElement {
    const grid = this.doc.createElement("div");
    grid.className = PREVIEW_CLASS;
    grid.dataset.childCount = String(entry.card.child_count);
    Object.assign(grid.style, { display: "flex", gap: "2px" });
    for (let i = 0; i < entry.preview.squares_shown; i += 1) {
      const square = this.doc.createElement("div");
      square.className = PREVIEW_SQUARE_CLASS;
      Object.assign(square.style, {
        width: "14px",
        height: "14px",
        background: "#cfd8dc",
        borderRadius: "2px",
      });
      grid.appendChild(square);
    }
    if (entry.preview.overflow > 0) {
      const chip = this.doc.createElement("div");
      chip.className = PREVIEW_OVERFLOW_CLASS;
      chip.textContent = `+${entry.preview.overflow}`;
      grid.appendChild(chip);
    }
    return grid;
  }
}
