// Background worker: wires the toolbar button, the keyboard command, and the
// "Collect with clipdeck" context menu (one entry per project) to the
// content script.

import { ApiClient } from "./api.js";
import { SERVICE_URL } from "./content.js";

export const TOGGLE_COMMAND = "toggle-sidebar";
export const MENU_ROOT_ID = "clipdeck-collect";

export async function rebuildContextMenu(client: ApiClient): Promise<void> {
  const { projects } = await client.listProjects();
  chrome.contextMenus.removeAll(() => {
    chrome.contextMenus.create({
      id: MENU_ROOT_ID,
      title: "Collect with clipdeck",
      contexts: ["selection"],
    });
    for (const project of projects) {
      chrome.contextMenus.create({
        id: `${MENU_ROOT_ID}:${project.id}`,
        title: project.name,
        contexts: ["selection"],
        parentId: MENU_ROOT_ID,
      });
    }
  });
}

export function startBackground(): void {
  const client = new ApiClient(SERVICE_URL);

  chrome.commands.onCommand.addListener((command, tab) => {
    if (command !== TOGGLE_COMMAND || tab?.id === undefined) return;
    chrome.tabs.sendMessage(tab.id, { type: "toggle-sidebar" });
  });

  chrome.action.onClicked.addListener((tab) => {
    if (tab.id === undefined) return;
    chrome.tabs.sendMessage(tab.id, { type: "toggle-sidebar" });
  });

  chrome.contextMenus.onClicked.addListener((info, tab) => {
    const id = String(info.menuItemId);
    if (!id.startsWith(`${MENU_ROOT_ID}:`) || tab?.id === undefined) return;
    const projectId = id.slice(MENU_ROOT_ID.length + 1);
    chrome.tabs.sendMessage(tab.id, { type: "capture-selection", projectId });
  });

  void rebuildContextMenu(client);
}

if (typeof chrome !== "undefined" && typeof document === "undefined") {
  startBackground();
}
