import * as path from "node:path";
import * as vscode from "vscode";

import { PlanClient, metricsFromEditor, svgToDataUri } from "./protocol";
import { FileDiagramState } from "./state";

const TRIANGLE_RIGHT = svgToDataUri(
  '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 16 16"><path d="M4 2 L13 8 L4 14 Z" fill="#d03030"/></svg>'
);
const TRIANGLE_DOWN = svgToDataUri(
  '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 16 16"><path d="M2 4 L14 4 L8 13 Z" fill="#d03030"/></svg>'
);

const states = new Map<string, FileDiagramState>();
const diagramDecorations = new Map<string, vscode.TextEditorDecorationType>();
let triangleRightDeco: vscode.TextEditorDecorationType;
let triangleDownDeco: vscode.TextEditorDecorationType;

function config() {
  return vscode.workspace.getConfiguration("borrowviz");
}

function stateFor(fileKey: string): FileDiagramState {
  let state = states.get(fileKey);
  if (!state) {
    state = new FileDiagramState();
    states.set(fileKey, state);
  }
  return state;
}

function currentMetrics() {
  const editorConfig = vscode.workspace.getConfiguration("editor");
  return metricsFromEditor(
    editorConfig.get<number>("fontSize", 14),
    editorConfig.get<number>("lineHeight", 0),
    config().get<number>("charWidthRatio", 0.6),
    editorConfig.get<number>("tabSize", 4)
  );
}

function paletteOptions() {
  return {
    errorColor: config().get<string>("errorColor"),
    infoColor: config().get<string>("infoColor"),
    infoColor2: config().get<string>("infoColor2"),
  };
}

function refreshDecorations(editor: vscode.TextEditor, state: FileDiagramState): void {
  const rights: vscode.Range[] = [];
  const downs: vscode.Range[] = [];
  for (const triangle of state.triangles()) {
    const range = new vscode.Range(triangle.line - 1, 0, triangle.line - 1, 0);
    (triangle.state === "shown" ? downs : rights).push(range);
  }
  editor.setDecorations(triangleRightDeco, rights);
  editor.setDecorations(triangleDownDeco, downs);

  const wanted = new Set(state.visibleBindings().map((b) => b.planId));
  for (const [id, deco] of diagramDecorations) {
    if (!wanted.has(id)) {
      deco.dispose();
      diagramDecorations.delete(id);
    }
  }
  for (const binding of state.visibleBindings()) {
    let deco = diagramDecorations.get(binding.planId);
    if (!deco) {
      deco = vscode.window.createTextEditorDecorationType({
        after: { contentIconPath: vscode.Uri.parse(svgToDataUri(binding.svg)) },
      });
      diagramDecorations.set(binding.planId, deco);
    }
    const line = binding.anchorLine - 1;
    const endCol = editor.document.lineAt(Math.min(line, editor.document.lineCount - 1)).text.length;
    editor.setDecorations(deco, [new vscode.Range(line, endCol, line, endCol)]);
  }
}

async function refreshFromSave(document: vscode.TextDocument, client: PlanClient): Promise<void> {
  if (document.languageId !== "rust") {
    return;
  }
  const folder = vscode.workspace.getWorkspaceFolder(document.uri);
  if (!folder) {
    return;
  }
  const relative = path.relative(folder.uri.fsPath, document.uri.fsPath);
  try {
    const payload = await client.request(folder.uri.fsPath, relative, currentMetrics(), paletteOptions());
    if (payload === null) {
      return; // a newer save superseded this request
    }
    const state = stateFor(document.uri.toString());
    state.applyPlans(payload.plans, config().get<boolean>("autoShow", false));
    const editor = vscode.window.visibleTextEditors.find(
      (e) => e.document.uri.toString() === document.uri.toString()
    );
    if (editor) {
      refreshDecorations(editor, state);
    }
  } catch (error) {
    // failure isolation: warn, keep prior triangles and diagrams untouched
    vscode.window.setStatusBarMessage(`borrowviz: ${String(error)}`, 5000);
  }
}

export function activate(context: vscode.ExtensionContext): void {
  const client = new PlanClient(config().get<string>("cliPath", "borrowviz"));

  triangleRightDeco = vscode.window.createTextEditorDecorationType({
    gutterIconPath: vscode.Uri.parse(TRIANGLE_RIGHT),
    gutterIconSize: "contain",
  });
  triangleDownDeco = vscode.window.createTextEditorDecorationType({
    gutterIconPath: vscode.Uri.parse(TRIANGLE_DOWN),
    gutterIconSize: "contain",
  });
  context.subscriptions.push(triangleRightDeco, triangleDownDeco);

  context.subscriptions.push(
    vscode.workspace.onDidSaveTextDocument((doc) => void refreshFromSave(doc, client))
  );

  context.subscriptions.push(
    vscode.commands.registerCommand("borrowviz.toggle", () => {
      const editor = vscode.window.activeTextEditor;
      if (!editor) {
        return;
      }
      const state = stateFor(editor.document.uri.toString());
      const line = editor.selection.active.line + 1;
      const result = state.toggleAtLine(line);
      if (result === "no-triangle") {
        vscode.window.setStatusBarMessage("borrowviz: no diagram on this line", 3000);
        return;
      }
      refreshDecorations(editor, state);
    })
  );

  context.subscriptions.push(
    vscode.workspace.onDidChangeConfiguration((event) => {
      if (!event.affectsConfiguration("editor.fontSize") && !event.affectsConfiguration("editor.lineHeight")) {
        return;
      }
      // re-request geometry only for files with visible diagrams
      for (const editor of vscode.window.visibleTextEditors) {
        const state = states.get(editor.document.uri.toString());
        if (state && state.hasVisible()) {
          void refreshFromSave(editor.document, client);
        }
      }
    })
  );
}

export function deactivate(): void {
  for (const deco of diagramDecorations.values()) {
    deco.dispose();
  }
  diagramDecorations.clear();
  states.clear();
}
