import { ApiClient } from './api.js';
import { mount } from './app.js';

mount(new ApiClient(''), document);
