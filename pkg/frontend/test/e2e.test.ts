// End-to-end: real clipdeck service process, fixture page in jsdom, all
// traffic through the client code. The region-clip check compares the stored
// HTML_FRAGMENT against an independent brute-force resolver over the same
// candidate nodes the client shipped.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, mutateWithRefresh } from "../src/api.js";
import { MINIATURE_CLASS, renderPeek } from "../src/peek.js";
import { renderReader } from "../src/reader.js";
import {
  collectLayoutNodes,
  type Rect,
  type RectProvider,
} from "../src/regionClip.js";
import type { LayoutNodeWire } from "../src/types.js";

const PORT = 18793;
const BASE_URL = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let dataDir: string;
let client: ApiClient;

async function waitForServer(): Promise<void> {
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE_URL}/projects`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), "clipdeck-e2e-"));
  server = spawn("clipdeck", ["serve", "--data-dir", dataDir, "--port", String(PORT)], {
    stdio: "ignore",
  });
  client = new ApiClient(BASE_URL);
  await waitForServer();
});

afterAll(() => {
  server.kill();
  rmSync(dataDir, { recursive: true, force: true });
});

// ------------------------------------------------------------ oracle

// Exact-arithmetic IoU as an integer pair, compared by cross-multiplication,
// with the documented tie-breaks: deeper node, smaller area, earlier node.
function iouPair(a: [number, number, number, number], b: Rect): [bigint, bigint] {
  const [ax, ay, aw, ah] = a;
  const overlapW = Math.min(ax + aw, b.x + b.width) - Math.max(ax, b.x);
  const overlapH = Math.min(ay + ah, b.y + b.height) - Math.max(ay, b.y);
  const inter = overlapW > 0 && overlapH > 0 ? BigInt(overlapW) * BigInt(overlapH) : 0n;
  const union = BigInt(aw) * BigInt(ah) + BigInt(b.width) * BigInt(b.height) - inter;
  return [inter, union];
}

function oracleResolve(nodes: LayoutNodeWire[], bbox: Rect): LayoutNodeWire | null {
  let best: LayoutNodeWire | null = null;
  let bestScore: [bigint, bigint] = [0n, 1n];
  for (const node of nodes) {
    const score = iouPair(node.rect, bbox);
    if (best === null) {
      best = node;
      bestScore = score;
      continue;
    }
    const cmp = score[0] * bestScore[1] - bestScore[0] * score[1];
    const area = (n: LayoutNodeWire) => BigInt(n.rect[2]) * BigInt(n.rect[3]);
    const wins =
      cmp > 0n ||
      (cmp === 0n &&
        (node.depth > best.depth ||
          (node.depth === best.depth &&
            (area(node) < area(best) ||
              (area(node) === area(best) && node.id < best.id)))));
    if (wins) {
      best = node;
      bestScore = score;
    }
  }
  if (best === null) return null;
  return bestScore[0] * 10n >= bestScore[1] ? best : null;
}

// ------------------------------------------------------------ fixture page

function attrRects(): RectProvider {
  return (element) => {
    const spec = element.getAttribute("data-rect");
    if (!spec) return { x: 0, y: 0, width: 0, height: 0 };
    const [x, y, width, height] = spec.split(",").map(Number) as [
      number,
      number,
      number,
      number,
    ];
    return { x, y, width, height };
  };
}

function fixturePage(): Element {
  document.body.innerHTML = `
    <div id="page" data-rect="0,0,1200,2000">
      <header id="top" data-rect="0,0,1200,80">Headphone Hub</header>
      <main id="main" data-rect="0,80,1200,1800">
        <article id="review" data-rect="50,100,700,900">
          <h1 id="title" data-rect="60,110,600,40">Sony WH-1000XM4 review</h1>
          <p id="intro" data-rect="60,170,650,120">noise cancellation is best-in-class</p>
          <table id="specs" data-rect="60,320,640,400"><tbody data-rect="62,322,636,396"><tr data-rect="62,322,636,40"><td data-rect="62,322,300,40">battery</td><td data-rect="362,322,336,40">30h</td></tr></tbody></table>
        </article>
        <aside id="related" data-rect="800,100,350,600">related links</aside>
      </main>
    </div>`;
  return document.getElementById("page") as Element;
}

const CTX = { url: "https://reviews.example.com/xm4", title: "XM4 review" };

// ------------------------------------------------------------ tests

describe("region clip against the live service", () => {
  it("stores an HTML_FRAGMENT equal to the oracle-resolved element", async () => {
    const { project } = await client.createProject("e2e region");
    const root = fixturePage();
    const rectOf = attrRects();
    const bbox: Rect = { x: 55, y: 315, width: 650, height: 410 };

    const nodes = collectLayoutNodes(root, bbox, rectOf);
    const expected = oracleResolve(nodes, bbox);
    expect(expected).not.toBeNull();
    const specsTable = document.getElementById("specs") as Element;
    expect(expected!.markup).toBe(specsTable.outerHTML);

    const reply = await client.captureRegion(
      project.id,
      CTX,
      bbox,
      nodes,
      Buffer.from("fake png bytes").toString("base64"),
    );
    const fragment = reply.card.representations.find(
      (rep) => rep.repr_kind === "HTML_FRAGMENT",
    );
    expect(fragment?.text).toBe(expected!.markup);

    const extracted = reply.card.representations.find(
      (rep) => rep.repr_kind === "EXTRACTED_TEXT",
    );
    expect(extracted?.text).toBe(expected!.text);

    const image = reply.card.representations.find(
      (rep) => rep.repr_kind === "REGION_IMAGE",
    );
    expect(image?.asset).toBeTruthy();
    const stored = await fetch(client.assetUrl(image!.asset!));
    expect(Buffer.from(await stored.arrayBuffer()).toString()).toBe("fake png bytes");
  });

  it("a selection over empty space resolves to no fragment", async () => {
    const { project } = await client.createProject("e2e miss");
    const root = fixturePage();
    const bbox: Rect = { x: 1190, y: 1900, width: 8, height: 8 };
    const nodes = collectLayoutNodes(root, bbox, attrRects());
    expect(oracleResolve(nodes, bbox)).toBeNull();
    const reply = await client.captureRegion(project.id, CTX, bbox, nodes, "aGk=");
    const kinds = reply.card.representations.map((rep) => rep.repr_kind);
    expect(kinds).not.toContain("HTML_FRAGMENT");
    expect(kinds).toContain("REGION_IMAGE");
  });
});

describe("peek against the live service", () => {
  it("hovering a container with k children shows k miniatures", async () => {
    const { project } = await client.createProject("e2e peek");
    const container = await client.mutate(project.id, 0, "create_card", {
      kind: "MANUAL",
      title: "Sony WH-1000XM4",
    });
    const containerId = (container.result.card as { id: string }).id;
    for (const [i, words] of ["thirty hours", "comfortable fit", "good price"].entries()) {
      await client.captureText(project.id, CTX, words, {
        parentId: containerId,
        position: i,
      });
    }
    const peek = await client.peek(containerId);
    expect(peek.entries).toHaveLength(3);
    const panel = renderPeek(document, peek.entries, (d) => client.assetUrl(d));
    expect(panel.querySelectorAll(`.${MINIATURE_CLASS}`)).toHaveLength(3);
    expect(panel.textContent).toContain("thirty hours");
  });
});

describe("sidebar flows against the live service", () => {
  it("conflict, refresh, retry lands the mutation", async () => {
    const { project } = await client.createProject("e2e conflict");
    await client.mutate(project.id, 0, "create_card", { kind: "FOLDER", title: "Options" });
    // Held revision 0 is now stale; the helper must refresh to 1 and win.
    const reply = await mutateWithRefresh(client, project.id, 0, "create_card", {
      kind: "MANUAL",
      title: "latecomer",
    });
    expect(reply.revision).toBe(2);
  });

  it("reader renders the server flattening of a real project", async () => {
    const { project } = await client.createProject("e2e reader");
    const folder = await client.mutate(project.id, 0, "create_card", {
      kind: "FOLDER",
      title: "Options",
    });
    const folderId = (folder.result.card as { id: string }).id;
    await client.captureText(project.id, CTX, "inside the folder", {
      parentId: folderId,
    });
    const reader = await client.reader(project.id);
    const panel = renderReader(document, reader.entries);
    const rows = Array.from(panel.querySelectorAll("[data-depth]")) as HTMLElement[];
    expect(rows.map((row) => row.dataset.depth)).toEqual(["0", "1"]);
    expect(panel.textContent).toContain("inside the folder");
  });
});
