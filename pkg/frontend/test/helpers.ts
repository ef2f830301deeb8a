// Shared test plumbing: a recording fake fetch and canned DTO builders.

import type { FetchLike } from "../src/api.js";
import type {
  CardDto,
  CardSummaryDto,
  OverviewEntryDto,
  PeekEntryDto,
} from "../src/types.js";

export interface RecordedRequest {
  url: string;
  method: string;
  body: unknown;
}

export interface CannedResponse {
  status?: number;
  body: unknown;
}

export function fakeFetch(responses: CannedResponse[]): {
  fetchFn: FetchLike;
  requests: RecordedRequest[];
} {
  const queue = [...responses];
  const requests: RecordedRequest[] = [];
  const fetchFn: FetchLike = async (url, init) => {
    requests.push({
      url,
      method: init?.method ?? "GET",
      body: typeof init?.body === "string" ? JSON.parse(init.body) : undefined,
    });
    const next = queue.shift();
    if (!next) throw new Error(`unexpected request: ${url}`);
    return new Response(JSON.stringify(next.body), {
      status: next.status ?? 200,
      headers: { "content-type": "application/json" },
    });
  };
  return { fetchFn, requests };
}

export function summary(overrides: Partial<CardSummaryDto> = {}): CardSummaryDto {
  return {
    card_id: "c1",
    kind: "MANUAL",
    title: "a card",
    header_image: null,
    source_host: "",
    annotation_excerpt: "",
    child_count: 0,
    collapsed: false,
    color: null,
    ...overrides,
  };
}

export function overviewEntry(
  overrides: Partial<OverviewEntryDto> = {},
): OverviewEntryDto {
  return {
    card: summary(),
    preview: { squares_shown: 0, overflow: 0 },
    children: [],
    ...overrides,
  };
}

export function cardDto(overrides: Partial<CardDto> = {}): CardDto {
  return {
    id: "c1",
    parent_id: null,
    kind: "MANUAL",
    title: "a card",
    annotation: "",
    color: null,
    order_index: 0,
    collapsed: false,
    representations: [],
    provenance: null,
    created_at: "2026-08-18T00:00:00.000000Z",
    updated_at: "2026-08-18T00:00:00.000000Z",
    ...overrides,
  };
}

export function peekEntry(overrides: Partial<PeekEntryDto> = {}): PeekEntryDto {
  return {
    card_id: "c1",
    image: null,
    excerpt: "text",
    title: "child",
    ...overrides,
  };
}
