"use strict";
var __createBinding = (this && this.__createBinding) || (Object.create ? (function(o, m, k, k2) {
    if (k2 === undefined) k2 = k;
    var desc = Object.getOwnPropertyDescriptor(m, k);
    if (!desc || ("get" in desc ? !m.__esModule : desc.writable || desc.configurable)) {
      desc = { enumerable: true, get: function() { return m[k]; } };
    }
    Object.defineProperty(o, k2, desc);
}) : (function(o, m, k, k2) {
    if (k2 === undefined) k2 = k;
    o[k2] = m[k];
}));
var __setModuleDefault = (this && this.__setModuleDefault) || (Object.create ? (function(o, v) {
    Object.defineProperty(o, "default", { enumerable: true, value: v });
}) : function(o, v) {
    o["default"] = v;
});
var __importStar = (this && this.__importStar) || (function () {
    var ownKeys = function(o) {
        ownKeys = Object.getOwnPropertyNames || function (o) {
            var ar = [];
            for (var k in o) if (Object.prototype.hasOwnProperty.call(o, k)) ar[ar.length] = k;
            return ar;
        };
        return ownKeys(o);
    };
    return function (mod) {
        if (mod && mod.__esModule) return mod;
        var result = {};
        if (mod != null) for (var k = ownKeys(mod), i = 0; i < k.length; i++) if (k[i] !== "default") __createBinding(result, mod, k[i]);
        __setModuleDefault(result, mod);
        return result;
    };
})();
Object.defineProperty(exports, "__esModule", { value: true });
exports.activate = activate;
exports.deactivate = deactivate;
const path = __importStar(require("node:path"));
const vscode = __importStar(require("vscode"));
const protocol_1 = require("./protocol");
const state_1 = require("./state");
const TRIANGLE_RIGHT = (0, protocol_1.svgToDataUri)('<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 16 16"><path d="M4 2 L13 8 L4 14 Z" fill="#d03030"/></svg>');
const TRIANGLE_DOWN = (0, protocol_1.svgToDataUri)('<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 16 16"><path d="M2 4 L14 4 L8 13 Z" fill="#d03030"/></svg>');
const states = new Map();
const diagramDecorations = new Map();
let triangleRightDeco;
let triangleDownDeco;
function config() {
    return vscode.workspace.getConfiguration("borrowviz");
}
function stateFor(fileKey) {
    let state = states.get(fileKey);
    if (!state) {
        state = new state_1.FileDiagramState();
        states.set(fileKey, state);
    }
    return state;
}
function currentMetrics() {
    const editorConfig = vscode.workspace.getConfiguration("editor");
    return (0, protocol_1.metricsFromEditor)(editorConfig.get("fontSize", 14), editorConfig.get("lineHeight", 0), config().get("charWidthRatio", 0.6), editorConfig.get("tabSize", 4));
}
function paletteOptions() {
    return {
        errorColor: config().get("errorColor"),
        infoColor: config().get("infoColor"),
        infoColor2: config().get("infoColor2"),
    };
}
function refreshDecorations(editor, state) {
    const rights = [];
    const downs = [];
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
                after: { contentIconPath: vscode.Uri.parse((0, protocol_1.svgToDataUri)(binding.svg)) },
            });
            diagramDecorations.set(binding.planId, deco);
        }
        const line = binding.anchorLine - 1;
        const endCol = editor.document.lineAt(Math.min(line, editor.document.lineCount - 1)).text.length;
        editor.setDecorations(deco, [new vscode.Range(line, endCol, line, endCol)]);
    }
}
async function refreshFromSave(document, client) {
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
        state.applyPlans(payload.plans, config().get("autoShow", false));
        const editor = vscode.window.visibleTextEditors.find((e) => e.document.uri.toString() === document.uri.toString());
        if (editor) {
            refreshDecorations(editor, state);
        }
    }
    catch (error) {
        // failure isolation: warn, keep prior triangles and diagrams untouched
        vscode.window.setStatusBarMessage(`borrowviz: ${String(error)}`, 5000);
    }
}
function activate(context) {
    const client = new protocol_1.PlanClient(config().get("cliPath", "borrowviz"));
    triangleRightDeco = vscode.window.createTextEditorDecorationType({
        gutterIconPath: vscode.Uri.parse(TRIANGLE_RIGHT),
        gutterIconSize: "contain",
    });
    triangleDownDeco = vscode.window.createTextEditorDecorationType({
        gutterIconPath: vscode.Uri.parse(TRIANGLE_DOWN),
        gutterIconSize: "contain",
    });
    context.subscriptions.push(triangleRightDeco, triangleDownDeco);
    context.subscriptions.push(vscode.workspace.onDidSaveTextDocument((doc) => void refreshFromSave(doc, client)));
    context.subscriptions.push(vscode.commands.registerCommand("borrowviz.toggle", () => {
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
    }));
    context.subscriptions.push(vscode.workspace.onDidChangeConfiguration((event) => {
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
    }));
}
function deactivate() {
    for (const deco of diagramDecorations.values()) {
        deco.dispose();
    }
    diagramDecorations.clear();
    states.clear();
}
//# sourceMappingURL=extension.js.map