// HTTP client for the clipdeck service. The fetch function is injectable so
// tests can run against a fake or a live server alike.

import type {
  BBoxWire,
  CaptureContextWire,
  CaptureReply,
  ErrorBody,
  LayoutNodeWire,
  MutationReply,
  OverviewDto,
  PeekDto,
  ProjectDto,
  ReaderDto,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly currentRevision: number | null = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function reject(response: Response): Promise<never> {
  let code = "UnknownError";
  let message = `request failed with status ${response.status}`;
  let currentRevision: number | null = null;
  try {
    const body = (await response.json()) as ErrorBody;
    code = body.error.code;
    message = body.error.message;
    if (typeof body.current_revision === "number") {
      currentRevision = body.current_revision;
    }
  } catch {
    // non-JSON error body; keep the fallback message
  }
  throw new ApiError(response.status, code, message, currentRevision);
}

export interface CapturePlacement {
  parentId?: string | null;
  position?: number;
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) await reject(response);
    return (await response.json()) as T;
  }

  createProject(name: string): Promise<{ project: ProjectDto }> {
    return this.request("POST", "/projects", { name });
  }

  listProjects(): Promise<{ projects: ProjectDto[] }> {
    return this.request("GET", "/projects");
  }

  overview(projectId: string): Promise<OverviewDto> {
    return this.request("GET", `/projects/${projectId}/overview`);
  }

  reader(projectId: string, rootCardId?: string): Promise<ReaderDto> {
    const query = rootCardId ? `?root=${encodeURIComponent(rootCardId)}` : "";
    return this.request("GET", `/projects/${projectId}/reader${query}`);
  }

  peek(cardId: string): Promise<PeekDto> {
    return this.request("GET", `/cards/${cardId}/peek`);
  }

  stats(projectId: string): Promise<{ project_id: string; revision: number; stats: object }> {
    return this.request("GET", `/projects/${projectId}/stats`);
  }

  captureText(
    projectId: string,
    ctx: CaptureContextWire,
    selectionText: string,
    placement: CapturePlacement = {},
  ): Promise<CaptureReply> {
    return this.request("POST", `/projects/${projectId}/capture/text`, {
      ctx,
      selection_text: selectionText,
      ...placementWire(placement),
    });
  }

  captureImage(
    projectId: string,
    ctx: CaptureContextWire,
    bytesB64: string,
    mediaType?: string,
    placement: CapturePlacement = {},
  ): Promise<CaptureReply> {
    return this.request("POST", `/projects/${projectId}/capture/image`, {
      ctx,
      bytes_b64: bytesB64,
      ...(mediaType ? { media_type: mediaType } : {}),
      ...placementWire(placement),
    });
  }

  captureBookmark(
    projectId: string,
    ctx: CaptureContextWire,
    archiveB64?: string,
    placement: CapturePlacement = {},
  ): Promise<CaptureReply> {
    return this.request("POST", `/projects/${projectId}/capture/bookmark`, {
      ctx,
      ...(archiveB64 ? { bytes_b64: archiveB64 } : {}),
      ...placementWire(placement),
    });
  }

  captureRegion(
    projectId: string,
    ctx: CaptureContextWire,
    bbox: BBoxWire,
    nodes: LayoutNodeWire[],
    screenshotB64?: string,
    placement: CapturePlacement = {},
  ): Promise<CaptureReply> {
    return this.request("POST", `/projects/${projectId}/capture/region`, {
      ctx,
      bbox,
      nodes,
      ...(screenshotB64 ? { bytes_b64: screenshotB64 } : {}),
      ...placementWire(placement),
    });
  }

  mutate(
    projectId: string,
    expectedRevision: number,
    op: string,
    args: Record<string, unknown>,
  ): Promise<MutationReply> {
    return this.request("POST", `/projects/${projectId}/mutations`, {
      expected_revision: expectedRevision,
      op,
      args,
    });
  }

  exportProject(projectId: string): Promise<object> {
    return this.request("GET", `/projects/${projectId}/export`);
  }

  assetUrl(digest: string): string {
    return `${this.baseUrl}/assets/${digest}`;
  }
}

function placementWire(placement: CapturePlacement): Record<string, unknown> {
  const wire: Record<string, unknown> = {};
  if (placement.parentId !== undefined) wire.parent_id = placement.parentId;
  if (placement.position !== undefined) wire.position = placement.position;
  return wire;
}

// Optimistic-concurrency helper: on a stale revision the server answers 409.
// Policy: refresh the overview (handed to the caller for re-rendering), retry
// once at the fresh revision, then give up.
export async function mutateWithRefresh(
  client: ApiClient,
  projectId: string,
  revision: number,
  op: string,
  args: Record<string, unknown>,
  onRefresh?: (overview: OverviewDto) => void,
): Promise<MutationReply> {
  try {
    return await client.mutate(projectId, revision, op, args);
  } catch (error) {
    if (!(error instanceof ApiError) || error.code !== "RevisionConflict") throw error;
    const overview = await client.overview(projectId);
    onRefresh?.(overview);
    return client.mutate(projectId, overview.revision, op, args);
  }
}
