// Minimal ambient surface of the extension APIs the shell files touch.
// Kept local so the build needs no external type packages.

interface ExtensionMessageSender {
  tab?: { id?: number };
}

interface ExtensionEvent<T extends (...args: never[]) => void> {
  addListener(callback: T): void;
}

interface ExtensionRuntime {
  getURL(path: string): string;
  sendMessage(message: unknown): void;
  onMessage: ExtensionEvent<
    (message: unknown, sender: ExtensionMessageSender) => void
  >;
}

interface ExtensionTabs {
  sendMessage(tabId: number, message: unknown): void;
}

interface ExtensionCommands {
  onCommand: ExtensionEvent<(command: string, tab?: { id?: number }) => void>;
}

interface ExtensionAction {
  onClicked: ExtensionEvent<(tab: { id?: number }) => void>;
}

interface ExtensionContextMenus {
  create(properties: {
    id: string;
    title: string;
    contexts: string[];
    parentId?: string;
  }): void;
  removeAll(callback?: () => void): void;
  onClicked: ExtensionEvent<
    (info: { menuItemId: string | number; selectionText?: string }, tab?: { id?: number }) => void
  >;
}

declare const chrome: {
  runtime: ExtensionRuntime;
  tabs: ExtensionTabs;
  commands: ExtensionCommands;
  action: ExtensionAction;
  contextMenus: ExtensionContextMenus;
};
