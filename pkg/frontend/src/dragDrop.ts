// Drop planning: each gesture maps to exactly one API call, or to a local
// rejection. The cycle pre-check mirrors the server's CycleRejected rule so
// an obviously bad drop never leaves the client.

export interface CardRef {
  id: string;
  parent_id: string | null;
}

export type DragPayload =
  | { kind: "card"; cardId: string }
  | { kind: "page-image"; bytesB64: string; mediaType?: string };

export interface DropTarget {
  parentId: string | null;
  position: number;
}

export type DropPlan =
  | { action: "mutation"; op: "move_card" | "reorder_card"; args: Record<string, unknown> }
  | { action: "capture-image"; bytesB64: string; mediaType?: string; target: DropTarget }
  | { action: "reject"; reason: string };

export function parentIndex(cards: CardRef[]): Map<string, string | null> {
  return new Map(cards.map((card) => [card.id, card.parent_id]));
}

// True when candidate sits somewhere below ancestor (or is ancestor itself).
export function wouldCycle(
  parents: Map<string, string | null>,
  ancestorId: string,
  candidateParentId: string | null,
): boolean {
  let cursor = candidateParentId;
  while (cursor !== null) {
    if (cursor === ancestorId) return true;
    cursor = parents.get(cursor) ?? null;
  }
  return false;
}

export function planDrop(
  cards: CardRef[],
  payload: DragPayload,
  target: DropTarget,
): DropPlan {
  if (payload.kind === "page-image") {
    return {
      action: "capture-image",
      bytesB64: payload.bytesB64,
      ...(payload.mediaType ? { mediaType: payload.mediaType } : {}),
      target,
    };
  }
  const parents = parentIndex(cards);
  if (!parents.has(payload.cardId)) {
    return { action: "reject", reason: `unknown card ${payload.cardId}` };
  }
  if (wouldCycle(parents, payload.cardId, target.parentId)) {
    return { action: "reject", reason: "cannot drop a card into its own subtree" };
  }
  const currentParent = parents.get(payload.cardId) ?? null;
  if (currentParent === target.parentId) {
    return {
      action: "mutation",
      op: "reorder_card",
      args: { card_id: payload.cardId, position: target.position },
    };
  }
  return {
    action: "mutation",
    op: "move_card",
    args: {
      card_id: payload.cardId,
      parent_id: target.parentId,
      position: target.position,
    },
  };
}
