export {
  RegistryClient,
  ServiceError,
  type ColumnInfo,
  type DataRole,
  type DatasetInfo,
  type ErrorDoc,
  type FanOutCellDoc,
  type JsonValue,
  type MatchInfo,
  type ParamDoc,
  type SettingsDoc,
  type SuggestionDoc,
  type TemplateDoc,
  type TemplateSummary,
  type TranslationDoc,
  type Transport,
} from "./api.js";
export {
  EditorStore,
  SupersedingRunner,
  type EditorSnapshot,
  type Mode,
  type PaneSource,
} from "./state.js";
export { renderWidgets, showWidgetErrors, rolePill } from "./widgets.js";
export { CodePane, type CodeTab } from "./codepane.js";
export { renderGallery, renderRelatedPopover } from "./gallery.js";
export { FanoutGallery } from "./fanout.js";
export { registerRenderer, renderSpec, type SpecRenderer } from "./render.js";
export { Editor, replaceAtPointer, type EditorOptions } from "./editor.js";
