namespace solv {}
